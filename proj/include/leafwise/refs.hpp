#pragma once

// Registry of known rigidity and cohomology statements from the literature.
// These are looked up by id and echoed with their sources; nothing in this
// table is computed by the tool, and the CLI marks every entry accordingly.

#include <string>
#include <vector>

namespace leafwise {

struct ReferenceEntry {
  std::string id;
  std::string statement;
  std::string value;   // the isomorphism type in short form
  std::string source;
  std::string note;
};

const std::vector<ReferenceEntry>& reference_table();

// nullptr when no entry has this id.
const ReferenceEntry* find_reference(const std::string& id);

// Entries whose id or statement contains the query (empty = everything).
std::vector<ReferenceEntry> search_references(const std::string& query);

}  // namespace leafwise
