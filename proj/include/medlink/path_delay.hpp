#pragma once

namespace medlink::composer {

// Per-packet or analytic end-to-end decomposition; d_total is always the sum
// of the three link delays, missing links contribute zero.
struct PathDelayReport {
    double d1 = 0.0;
    double d2 = 0.0;
    double d3 = 0.0;
    double d_total = 0.0;
};

inline PathDelayReport make_path_report(double d1, double d2, double d3) {
    return {d1, d2, d3, d1 + d2 + d3};
}

}  // namespace medlink::composer
