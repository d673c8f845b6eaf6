#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ifs/hyperspace.hpp"

namespace ifs {

struct Expectation {
    std::string probe;
    std::string verdict;
    nlohmann::json params = nlohmann::json::object();
};

struct NamedSystem {
    std::string name;
    IfsSystem system;
    std::vector<Expectation> expected;
    std::string provenance;
    bool stand_in = false;
    std::vector<std::string> warnings;

    nlohmann::json to_json() const;
};

NamedSystem make_single_rotation(double alpha);
NamedSystem make_two_rotations(double alpha, std::pair<int, int> rational_offset);
NamedSystem make_rotation_morse_smale(double alpha, double attractor, double repeller, double contraction);
// Degree-2 cover, the two branches generating K_I, the gap pair and h.
NamedSystem make_cantor_group_instance();
// STAND-IN: homeomorphisms preserving K_I, optionally with h appended.
NamedSystem make_cantor_preserving_ifs(bool with_h = false);
// Inverse branches y/3 + 1/6, y/3 + 1/3 of the cover; attractor is the
// middle-thirds set of [1/4,1/2].
NamedSystem make_cantor_branches();
// The gap pair in normalized coordinates.
NamedSystem make_fig2_pair();
// STAND-IN: the Cantor-preserving generators together with their inverses.
NamedSystem make_cantor_symmetric();
NamedSystem pad_with_identity(const NamedSystem& sys, int k_target);

std::vector<std::string> catalog_names();
NamedSystem catalog_lookup(const std::string& name);

// Depth-n endpoint set of the middle-thirds construction on [a,b]: 2^(n+1) points.
std::vector<double> middle_thirds_net(double a, double b, int n);
// K_n for I = [1/4,1/3].
std::vector<double> cantor_net(int n);
// Affine contractions y/3 + 1/6 and y/3 + 2/9 of I onto its outer thirds,
// closed up to circle homeomorphisms.
std::pair<CircleMap, CircleMap> cantor_branches_I();

struct CantorChecks {
    double max_branch_step = 0.0;      // max_n d_H(branches(K_n), K_{n+1})
    double h_containment = 0.0;        // directed distance K_n -> h(K_n)
    double h_excess = 0.0;             // d_H(h(K_n), K_n)
    double strictness_witness = 0.0;   // h(1/3)
    double witness_distance = 0.0;     // distance of the witness from K_n
    bool ok = false;
    nlohmann::json to_json() const;
};

CantorChecks cantor_group_checks(int depth = 12, double delta = kDefaultDelta);

}  // namespace ifs
