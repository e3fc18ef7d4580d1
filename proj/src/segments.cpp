#include "standoff/segments.hpp"

#include <sstream>

#include "standoff/errors.hpp"

namespace standoff {

namespace {

bool inside(const Interval& inner, const Interval& outer) {
  return inner.start() >= outer.start() && inner.end() <= outer.end();
}

}  // namespace

SegmentContext segment_context(const Interval& c1, const Interval& c2, const Interval& sentence) {
  for (const Interval* c : {&c1, &c2}) {
    if (!inside(*c, sentence)) {
      std::ostringstream os;
      os << "concept " << *c << " outside sentence " << sentence;
      throw BoundsError(os.str());
    }
  }
  if (c2.start() < c1.start()) {
    std::ostringstream os;
    os << "second concept " << c2 << " starts before first " << c1;
    throw OrderError(os.str());
  }
  if (c1.end() > c2.start()) {
    std::ostringstream os;
    os << "concepts " << c1 << " and " << c2 << " overlap";
    throw OverlapError(os.str());
  }
  return SegmentContext{
      Interval(sentence.start(), c1.start()),
      c1,
      Interval(c1.end(), c2.start()),
      c2,
      Interval(c2.end(), sentence.end()),
  };
}

SegmentContext segment_context(const Annotation& c1, const Annotation& c2,
                               const Annotation& sentence) {
  if (c1.id != 0 && c1.id == c2.id) {
    throw OverlapError("both concepts are annotation " + std::to_string(c1.id));
  }
  return segment_context(c1.span, c2.span, sentence.span);
}

}  // namespace standoff
