#include "singflow/grid.hpp"

#include <stdexcept>

namespace singflow {

TorusGrid::TorusGrid(int n, double length) : n_(n), length_(length), spacing_(length / n) {
    if (n < 4) throw std::invalid_argument("grid needs at least 4 nodes per axis");
    if (!(length > 0.0)) throw std::invalid_argument("grid length must be positive");
}

Field TorusGrid::coordinate(int axis) const {
    return sample([axis](const Point& p) { return p[axis]; });
}

}  // namespace singflow
