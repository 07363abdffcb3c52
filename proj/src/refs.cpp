#include "leafwise/refs.hpp"

#include <algorithm>

namespace leafwise {

namespace {

const char* kNotComputed = "reference only — not computed by this tool";

std::vector<ReferenceEntry> build_table() {
  std::vector<ReferenceEntry> t;
  t.push_back({"weyl-chamber",
               "H^1(A_p) ≅ R^p, p ≥ 2",
               "R^p",
               "Katok and Spatzier 1994",
               kNotComputed});
  t.push_back({"weyl-chamber-local",
               "The orbit foliation of the Weyl chamber flow is locally "
               "rigid for p ≥ 2",
               "locally rigid",
               "Katok and Spatzier 1997",
               kNotComputed});
  t.push_back({"full-flag",
               "H^1(F_p) ≅ R^p, p ≥ 2, for the orbit foliation of the "
               "upper-triangular subgroup of SL(p+1,R)",
               "R^p",
               "Katok and Spatzier 1994 (restriction argument)",
               kNotComputed});
  t.push_back({"sl2r-parabolic",
               "H^1(F) ≅ R ⊕ H^1(M) for the parabolic subgroup acting on "
               "M = Γ\\SL(2,R)",
               "R ⊕ H^1(M)",
               "Matsumoto and Mitsumatsu 2003",
               kNotComputed});
  t.push_back({"sl2c-parabolic",
               "H^1(F) ≅ R² ⊕ H^1(M)",
               "R² ⊕ H^1(M)",
               "Mieczkowski 2007",
               kNotComputed});
  t.push_back({"abelian-criterion",
               "A locally free R^p-action on a closed manifold is parameter "
               "rigid iff H^1(F) ≅ R^p",
               "criterion",
               "Matsumoto and Mitsumatsu 2003",
               kNotComputed});
  t.push_back({"heisenberg-rigid",
               "If H^1(F) ≅ H^1(h) then every locally free Heisenberg action "
               "with orbit foliation F is parameter rigid",
               "criterion",
               "dos Santos 2007; nilpotent generalization by Maruhashi",
               kNotComputed});
  t.push_back({"sol-suspension-rigid",
               "The suspension GA-action of a hyperbolic toral automorphism "
               "is parameter rigid, and locally rigid",
               "rigid",
               "Matsumoto and Mitsumatsu 2003; El Kacimi Alaoui and Nicolau "
               "1993",
               kNotComputed});
  t.push_back({"ga-deformation",
               "When H^1(M) is non-trivial the standard GA-action on "
               "Γ\\SL(2,R) is not parameter rigid; it admits a complete "
               "parameter deformation over an open subset of H^1(M)",
               "H^1(M)-parametrized deformation",
               "Asaoka 2009",
               kNotComputed});
  t.push_back({"ga-c-rigid",
               "The standard complex GA-action on Γ\\SL(2,C) is locally "
               "parameter rigid",
               "locally rigid",
               "Asaoka, preprint",
               kNotComputed});
  return t;
}

}  // namespace

const std::vector<ReferenceEntry>& reference_table() {
  static const std::vector<ReferenceEntry> table = build_table();
  return table;
}

const ReferenceEntry* find_reference(const std::string& id) {
  for (const auto& e : reference_table())
    if (e.id == id) return &e;
  return nullptr;
}

std::vector<ReferenceEntry> search_references(const std::string& query) {
  std::vector<ReferenceEntry> out;
  for (const auto& e : reference_table()) {
    if (query.empty() || e.id.find(query) != std::string::npos ||
        e.statement.find(query) != std::string::npos)
      out.push_back(e);
  }
  return out;
}

}  // namespace leafwise
