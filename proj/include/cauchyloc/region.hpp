// Copyright 2026 The cauchyloc authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * Chart regions on Cauchy-surface graphs (balls, boxes, complements,
 * unions, predicates) and the region-of-influence geometry
 * Delta' = (J+(Delta) u J-(Delta)) ^ S'.
 */

#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "surface.hpp"

namespace cauchyloc {

/// Axis-aligned bounding box in chart coordinates.
struct BoundingBox {
    Vec3 lo;
    Vec3 hi;
};

/// A chart region with a decidable membership predicate. The structured
/// shapes (Ball, Box, Complement, Union, All) carry enough geometry for
/// analytic integration fast paths; Predicate regions only expose
/// membership plus a bounding box.
class Region {
  public:
    enum class Kind { All, Ball, Box, Complement, Union, Predicate };

    static Region all() { return Region(Kind::All); }

    static Region ball(const Vec3 &center, double radius) {
        if (!finite3(center) || !(radius >= 0.0)) {
            throw std::invalid_argument("Region::ball: bad parameters");
        }
        Region r(Kind::Ball);
        r.center_ = center;
        r.radius_ = radius;
        return r;
    }

    static Region box(const Vec3 &lo, const Vec3 &hi) {
        for (int a = 0; a < 3; ++a) {
            if (!(lo[a] <= hi[a])) {
                throw std::invalid_argument("Region::box: lo > hi");
            }
        }
        Region r(Kind::Box);
        r.center_ = lo; // lo corner
        r.hi_ = hi;
        return r;
    }

    static Region complement(Region inner) {
        Region r(Kind::Complement);
        r.children_.push_back(std::make_shared<Region>(std::move(inner)));
        return r;
    }

    static Region union_of(Region a, Region b) {
        Region r(Kind::Union);
        r.children_.push_back(std::make_shared<Region>(std::move(a)));
        r.children_.push_back(std::make_shared<Region>(std::move(b)));
        return r;
    }

    static Region predicate(std::function<bool(const Vec3 &)> member, BoundingBox bbox) {
        Region r(Kind::Predicate);
        r.pred_ = std::move(member);
        r.bbox_ = bbox;
        return r;
    }

    bool contains(const Vec3 &x) const {
        if (!finite3(x)) {
            throw std::invalid_argument("Region::contains: non-finite point");
        }
        switch (kind_) {
        case Kind::All:
            return true;
        case Kind::Ball: {
            const Vec3 d = sub3(x, center_);
            return dot3(d, d) <= radius_ * radius_;
        }
        case Kind::Box:
            for (int a = 0; a < 3; ++a) {
                if (x[a] < center_[a] || x[a] > hi_[a]) {
                    return false;
                }
            }
            return true;
        case Kind::Complement:
            return !children_[0]->contains(x);
        case Kind::Union:
            return children_[0]->contains(x) || children_[1]->contains(x);
        case Kind::Predicate:
            return pred_(x);
        }
        return false;
    }

    Kind kind() const { return kind_; }
    const Vec3 &ball_center() const { return center_; }
    double ball_radius() const { return radius_; }
    const Vec3 &box_lo() const { return center_; }
    const Vec3 &box_hi() const { return hi_; }
    const Region &child(std::size_t i) const { return *children_[i]; }

    bool bounded() const {
        switch (kind_) {
        case Kind::Ball:
        case Kind::Box:
        case Kind::Predicate:
            return true;
        case Kind::Union:
            return children_[0]->bounded() && children_[1]->bounded();
        default:
            return false;
        }
    }

    /// Bounding box for bounded regions; nullopt for All / complements.
    std::optional<BoundingBox> bounding_box() const {
        switch (kind_) {
        case Kind::Ball: {
            const Vec3 r{radius_, radius_, radius_};
            return BoundingBox{sub3(center_, r), add3(center_, r)};
        }
        case Kind::Box:
            return BoundingBox{center_, hi_};
        case Kind::Predicate:
            return bbox_;
        case Kind::Union: {
            auto a = children_[0]->bounding_box();
            auto b = children_[1]->bounding_box();
            if (!a || !b) {
                return std::nullopt;
            }
            BoundingBox r = *a;
            for (int i = 0; i < 3; ++i) {
                r.lo[i] = std::min(r.lo[i], b->lo[i]);
                r.hi[i] = std::max(r.hi[i], b->hi[i]);
            }
            return r;
        }
        default:
            return std::nullopt;
        }
    }

  private:
    explicit Region(Kind k) : kind_(k) {}

    Kind kind_;
    Vec3 center_{0, 0, 0}; // ball center, or box lo corner
    double radius_{0.0};
    Vec3 hi_{0, 0, 0};
    std::vector<std::shared_ptr<Region>> children_;
    std::function<bool(const Vec3 &)> pred_;
    BoundingBox bbox_{{0, 0, 0}, {0, 0, 0}};
};

/// Configuration for the deterministic dense sampling that decides
/// region-of-influence membership on curved surfaces.
struct RegionSampler {
    double pitch{0.1};
    int refine_factor{8};
};

namespace detail {

/// Best causal-reachability margin of target chart point x on S2 against the
/// sampled source set: max over sampled p of |t2(x) - t1(p)| - |x - p|.
/// Nonnegative means x lies in the region of influence.
inline double influence_margin_sampled(const Region &delta, const CauchySurfaceGraph &S,
                                       const CauchySurfaceGraph &S2, const Vec3 &x,
                                       const RegionSampler &sampler) {
    const auto bbox = delta.bounding_box();
    if (!bbox) {
        throw std::invalid_argument("influence_membership: unbounded region on curved surfaces "
                                    "is an unsupported configuration");
    }
    const double t2 = S2.height(x);
    double best = -std::numeric_limits<double>::infinity();
    Vec3 best_p{0, 0, 0};
    const double pitch = sampler.pitch;
    for (int a = 0;; ++a) {
        const double px = bbox->lo[0] + (a + 0.5) * pitch;
        if (px > bbox->hi[0]) {
            break;
        }
        for (int b = 0;; ++b) {
            const double py = bbox->lo[1] + (b + 0.5) * pitch;
            if (py > bbox->hi[1]) {
                break;
            }
            for (int c = 0;; ++c) {
                const double pz = bbox->lo[2] + (c + 0.5) * pitch;
                if (pz > bbox->hi[2]) {
                    break;
                }
                const Vec3 p{px, py, pz};
                if (!delta.contains(p)) {
                    continue;
                }
                const double m = std::abs(t2 - S.height(p)) - norm3(sub3(x, p));
                if (m > best) {
                    best = m;
                    best_p = p;
                }
            }
        }
    }
    if (!std::isfinite(best)) {
        return best; // empty sampled source
    }
    // Local refinement around the best coarse sample.
    const double fine = pitch / sampler.refine_factor;
    for (int a = -sampler.refine_factor; a <= sampler.refine_factor; ++a) {
        for (int b = -sampler.refine_factor; b <= sampler.refine_factor; ++b) {
            for (int c = -sampler.refine_factor; c <= sampler.refine_factor; ++c) {
                const Vec3 p{best_p[0] + a * fine, best_p[1] + b * fine, best_p[2] + c * fine};
                if (!delta.contains(p)) {
                    continue;
                }
                best = std::max(best, std::abs(t2 - S.height(p)) - norm3(sub3(x, p)));
            }
        }
    }
    return best;
}

} // namespace detail

/// Membership of x in the region of influence of Delta (on S) on the target
/// surface S2. Closed form for balls between untilted flat surfaces;
/// otherwise decided by deterministic sampling with a conservative
/// one-pitch boundary band.
inline bool influence_membership(const Region &delta, const CauchySurfaceGraph &S,
                                 const CauchySurfaceGraph &S2, const Vec3 &x,
                                 const RegionSampler &sampler = {}) {
    if (S.same_as(S2)) {
        // Spacelike Cauchy surfaces are acausal: Delta' = Delta.
        return delta.contains(x);
    }
    if (delta.kind() == Region::Kind::Ball && S.is_untilted_flat() && S2.is_untilted_flat()) {
        const double dt = std::abs(S2.as_flat()->t0 - S.as_flat()->t0);
        return norm3(sub3(x, delta.ball_center())) <= delta.ball_radius() + dt;
    }
    if (!delta.bounded() && !(S.is_flat() && S2.is_flat())) {
        throw std::invalid_argument("influence_membership: unbounded region with non-flat "
                                    "surfaces is unsupported");
    }
    const double margin = detail::influence_margin_sampled(delta, S, S2, x, sampler);
    return margin >= -sampler.pitch;
}

/// The region of influence as a Region value on the target surface's chart.
inline Region influence_region(const Region &delta, const CauchySurfaceGraph &S,
                               const CauchySurfaceGraph &S2, const RegionSampler &sampler = {}) {
    if (S.same_as(S2)) {
        return delta;
    }
    if (delta.kind() == Region::Kind::Ball && S.is_untilted_flat() && S2.is_untilted_flat()) {
        const double dt = std::abs(S2.as_flat()->t0 - S.as_flat()->t0);
        return Region::ball(delta.ball_center(), delta.ball_radius() + dt);
    }
    const auto bbox = delta.bounding_box();
    if (!bbox) {
        throw std::invalid_argument("influence_region: region must be bounded");
    }
    // The influence region lives inside the source bbox inflated by the
    // maximal height gap |t_{S2}(x) - t_S(p)|; iterate since the gap itself
    // grows with the window on tilted surfaces (|grad t| < 1 guarantees a
    // fixed point).
    auto height_range = [](const CauchySurfaceGraph &S_, const BoundingBox &bb) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        const int n = 9;
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                for (int c = 0; c < n; ++c) {
                    const Vec3 p{bb.lo[0] + (bb.hi[0] - bb.lo[0]) * a / (n - 1.0),
                                 bb.lo[1] + (bb.hi[1] - bb.lo[1]) * b / (n - 1.0),
                                 bb.lo[2] + (bb.hi[2] - bb.lo[2]) * c / (n - 1.0)};
                    const double t = S_.height(p);
                    lo = std::min(lo, t);
                    hi = std::max(hi, t);
                }
            }
        }
        return std::pair<double, double>{lo, hi};
    };
    const auto [t1lo, t1hi] = height_range(S, *bbox);
    double inflate = 1.0;
    for (int iter = 0; iter < 64; ++iter) {
        const BoundingBox window{sub3(bbox->lo, Vec3{inflate, inflate, inflate}),
                                 add3(bbox->hi, Vec3{inflate, inflate, inflate})};
        const auto [t2lo, t2hi] = height_range(S2, window);
        const double gap = std::max(std::abs(t2hi - t1lo), std::abs(t2lo - t1hi));
        if (gap + 2.0 * sampler.pitch <= inflate) {
            break;
        }
        inflate = std::max(gap + 2.0 * sampler.pitch, 1.25 * inflate);
    }
    BoundingBox out{sub3(bbox->lo, Vec3{inflate, inflate, inflate}),
                    add3(bbox->hi, Vec3{inflate, inflate, inflate})};
    auto S_copy = S;
    auto S2_copy = S2;
    auto delta_copy = delta;
    return Region::predicate(
        [delta_copy, S_copy, S2_copy, sampler](const Vec3 &x) {
            return influence_membership(delta_copy, S_copy, S2_copy, x, sampler);
        },
        out);
}

} // namespace cauchyloc
