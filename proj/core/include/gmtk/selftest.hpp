#pragma once
#include <string>
#include <vector>

#include "gmtk/scene.hpp"

namespace gmtk {

/// Built-in reference scenes used across the acceptance suite and shipped
/// as example documents by `gmtk examples`.
namespace scenes {
Scene segment();                           // unit segment, n=2, H^1 = 1
Scene circle();                            // unit circle, n=2, H^1 = 2 pi
Scene sphere_cap();                        // cap r <= 0.6 on S^2, H^2 = 0.4 pi
Scene parabola();                          // y = x^2 on (0,1), n=2
Scene helix();                             // (cos 2pi t, sin 2pi t, t), n=3
Scene double_graphs(double slope = 1e-3);  // two near-parallel graphs, H^1 = 1 + sqrt(1+s^2)
Scene points();                            // three isolated points, H^0 = 3
} // namespace scenes

struct CheckLine {
    int criterion = 0;
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Runs the acceptance criteria (1..9; 0 = all) and returns one line per
/// individual check.
std::vector<CheckLine> run_acceptance(int criterion = 0);

} // namespace gmtk
