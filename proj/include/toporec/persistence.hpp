#pragma once

#include <iosfwd>
#include <vector>

#include "toporec/height.hpp"

namespace toporec {

struct PersistencePair {
  double birth = 0.0;
  double death = 0.0;
  double persistence() const { return death - birth; }
};

// 0-dimensional persistence diagram of the sublevel filtration induced by a
// HeightField. The essential component is capped at death = h_infinity.
struct PersistenceDiagram {
  std::vector<PersistencePair> pairs;
  double h_infinity = 0.0;
  int direction_index = 0;
};

// Union-find sweep over pixels in (value, row-major index) order with
// 8-neighbor connectivity. On the top-cube complex every shared face takes
// the minimum of its incident pixels, so sublevel connectivity of the full
// complex reduces to 8-connectivity on pixels; the oracle below checks that
// equivalence.
//
// A pixel with no earlier neighbor starts a component (a birth). A pixel
// that bridges components merges them under the elder rule: the component
// with the smaller (birth value, birth pixel index) survives, the younger
// one emits (its birth, current value). The final component emits
// (its birth, h_infinity). Zero-persistence pairs are kept.
PersistenceDiagram compute_pd0(const HeightField& hf);

// Independent check: number of 8-connected components of {value <= t},
// by flood fill.
int component_count_oracle(const HeightField& hf, double t);

// Number of diagram pairs alive at threshold t (birth <= t < death).
int alive_pairs(const PersistenceDiagram& pd, double t);

// Text form, one `direction_index birth death` line per pair with
// 17-significant-digit values; `#` lines carry h_infinity and provenance.
void write_pd_text(std::ostream& out, const std::vector<PersistenceDiagram>& pds,
                   const std::string& source_id);
std::vector<PersistenceDiagram> read_pd_text(std::istream& in);

}  // namespace toporec
