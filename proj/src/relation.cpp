#include "simrel/relation.hpp"

namespace simrel {

Relation label_equal_relation(const Model& m) {
  Relation r(m.n);
  for (StateId a = 0; a < m.n; ++a)
    for (StateId b = 0; b < m.n; ++b)
      if (m.label_equal(a, b)) r.insert(a, b);
  return r;
}

} // namespace simrel
