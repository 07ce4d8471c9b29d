#pragma once

// Tiny hand-written instances shared across the test suites.

#include <string>

#include "lll_lab/csp.hpp"

// Two uniform boolean variables, one constraint forbidding (1,1).
inline lll_lab::AtomicCsp single_edge() {
  return lll_lab::AtomicCsp::from_json_text(R"({
    "variables": [{"domain": ["0", "1"]}, {"domain": ["0", "1"]}],
    "constraints": [{"scope": [0, 1], "forbidden": [1, 1]}]
  })");
}

// Three uniform boolean variables in a path: (1,1) forbidden on both edges.
inline lll_lab::AtomicCsp path3() {
  return lll_lab::AtomicCsp::from_json_text(R"({
    "variables": [{"domain": ["0", "1"]}, {"domain": ["0", "1"]},
                  {"domain": ["0", "1"]}],
    "constraints": [{"scope": [0, 1], "forbidden": [1, 1]},
                    {"scope": [1, 2], "forbidden": [1, 1]}]
  })");
}

// Star: center variable 0 joined to three leaves, (1,1) forbidden per edge.
inline lll_lab::AtomicCsp star3() {
  return lll_lab::AtomicCsp::from_json_text(R"({
    "variables": [{"domain": ["0", "1"]}, {"domain": ["0", "1"]},
                  {"domain": ["0", "1"]}, {"domain": ["0", "1"]}],
    "constraints": [{"scope": [0, 1], "forbidden": [1, 1]},
                    {"scope": [0, 2], "forbidden": [1, 1]},
                    {"scope": [0, 3], "forbidden": [1, 1]}]
  })");
}

// Biased boolean edge: value 1 has weight 3/4 on both endpoints.
inline lll_lab::AtomicCsp weighted_edge() {
  return lll_lab::AtomicCsp::from_json_text(R"({
    "variables": [{"domain": ["0", "1"], "weights": [0.25, 0.75]},
                  {"domain": ["0", "1"], "weights": [0.25, 0.75]}],
    "constraints": [{"scope": [0, 1], "forbidden": [1, 1]}]
  })");
}

// Six-valued uniform domains; two width-5 constraints sharing scope {1..5}
// after a pin of variable 0 (used for the expected-discrepancy bound).
inline lll_lab::AtomicCsp wide_pair() {
  return lll_lab::AtomicCsp::from_json_text(R"({
    "variables": [{"domain": ["0","1","2","3","4","5"]},
                  {"domain": ["0","1","2","3","4","5"]},
                  {"domain": ["0","1","2","3","4","5"]},
                  {"domain": ["0","1","2","3","4","5"]},
                  {"domain": ["0","1","2","3","4","5"]},
                  {"domain": ["0","1","2","3","4","5"]}],
    "constraints": [{"scope": [0,1,2,3,4,5], "forbidden": [0,0,0,0,0,0]},
                    {"scope": [0,1,2,3,4,5], "forbidden": [1,1,0,0,0,0]}]
  })");
}

// Six-valued uniform domains; two overlapping width-4 all-zero constraints
// (used for the disjoint-constraint containment bound).
inline lll_lab::AtomicCsp overlap_pair() {
  return lll_lab::AtomicCsp::from_json_text(R"({
    "variables": [{"domain": ["0","1","2","3","4","5"]},
                  {"domain": ["0","1","2","3","4","5"]},
                  {"domain": ["0","1","2","3","4","5"]},
                  {"domain": ["0","1","2","3","4","5"]},
                  {"domain": ["0","1","2","3","4","5"]}],
    "constraints": [{"scope": [0,1,2,3], "forbidden": [0,0,0,0]},
                    {"scope": [1,2,3,4], "forbidden": [0,0,0,0]}]
  })");
}
