#pragma once

#include <vector>

#include "kqic/data_model.hpp"

namespace kqic::testing {

inline Dataset make(std::vector<Sample> samples) { return Dataset(samples); }

// Three subjects, all events, every pair comparable and concordant.
inline Dataset d3() { return make({{1, 4, true}, {2, 5, true}, {3, 6, true}}); }

// d3 with the middle subject censored.
inline Dataset d3c() { return make({{1, 4, true}, {2, 5, false}, {3, 6, true}}); }

// Six subjects with mixed censoring and partial overlap of windows.
inline Dataset e6() {
    return make({{0.5, 1.5, true},
                 {0.1, 0.9, false},
                 {1.2, 3.0, true},
                 {0.3, 2.5, true},
                 {2.0, 2.2, false},
                 {0.7, 1.1, true}});
}

}  // namespace kqic::testing
