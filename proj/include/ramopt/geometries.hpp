#pragma once

#include <memory>

#include "ramopt/euclidean.hpp"
#include "ramopt/fixed_rank.hpp"
#include "ramopt/oblique.hpp"
#include "ramopt/spd.hpp"
#include "ramopt/stiefel.hpp"

namespace ramopt {

inline std::shared_ptr<ObliqueGeometry> oblique_geometry(Eigen::Index n,
                                                         Eigen::Index p) {
  return std::make_shared<ObliqueGeometry>(n, p);
}

inline std::shared_ptr<StiefelGeometry> stiefel_geometry(Eigen::Index n,
                                                         Eigen::Index p) {
  return std::make_shared<StiefelGeometry>(n, p);
}

inline std::shared_ptr<SpdGeometry> spd_geometry(Eigen::Index n) {
  return std::make_shared<SpdGeometry>(n);
}

inline std::shared_ptr<FixedRankGeometry> fixedrank_geometry(Eigen::Index n,
                                                             Eigen::Index m,
                                                             Eigen::Index k) {
  return std::make_shared<FixedRankGeometry>(n, m, k);
}

inline std::shared_ptr<EuclideanGeometry> euclidean_geometry(Eigen::Index r,
                                                             Eigen::Index c) {
  return std::make_shared<EuclideanGeometry>(r, c);
}

}  // namespace ramopt
