#pragma once

#include "standoff/annotation.hpp"

namespace standoff {

// Five-way split of a sentence around an ordered concept pair. The spans
// are contiguous and together cover the sentence exactly.
struct SegmentContext {
  Interval preceding;
  Interval concept1;
  Interval between;
  Interval concept2;
  Interval succeeding;
};

// Throws BoundsError when a concept lies outside the sentence, OrderError
// when the second concept starts before the first, and OverlapError when
// the concepts overlap.
SegmentContext segment_context(const Interval& c1, const Interval& c2, const Interval& sentence);

// Same, for annotations; passing the same annotation twice is an overlap.
SegmentContext segment_context(const Annotation& c1, const Annotation& c2,
                               const Annotation& sentence);

}  // namespace standoff
