#include "trinket/matching/homography.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "trinket/common/error.hpp"
#include "trinket/common/rng.hpp"

namespace trinket::match {
namespace {

using Mat3 = Eigen::Matrix3d;

Mat3 to_eigen(const Homography& h) {
  Mat3 m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = h(r, c);
  return m;
}

Homography from_eigen(const Mat3& m) {
  std::array<double, 9> a{};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) a[3 * r + c] = m(r, c);
  return Homography::from_matrix(a);
}

/// Similarity transform taking the points' centroid to the origin and their
/// mean distance from it to sqrt(2).
Mat3 normalizer(std::span<const Point2> pts) {
  double mx = 0, my = 0;
  for (auto p : pts) {
    mx += p.x;
    my += p.y;
  }
  mx /= pts.size();
  my /= pts.size();
  double mean_dist = 0;
  for (auto p : pts) mean_dist += std::hypot(p.x - mx, p.y - my);
  mean_dist /= pts.size();
  const double s = mean_dist > 1e-12 ? std::sqrt(2.0) / mean_dist : 1.0;
  Mat3 t;
  t << s, 0, -s * mx, 0, s, -s * my, 0, 0, 1;
  return t;
}

Point2 transform(const Mat3& t, Point2 p) {
  return {t(0, 0) * p.x + t(0, 2), t(1, 1) * p.y + t(1, 2)};
}

bool collinear(Point2 a, Point2 b, Point2 c) {
  const double cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
  return std::abs(cross) < 1e-6;
}

bool any_three_collinear(const std::array<Point2, 4>& p) {
  return collinear(p[0], p[1], p[2]) || collinear(p[0], p[1], p[3]) || collinear(p[0], p[2], p[3]) ||
         collinear(p[1], p[2], p[3]);
}

/// Exact four-point solve with h33 = 1, by Gaussian elimination with partial
/// pivoting. Returns false for a singular system.
bool solve_four_point(const std::array<Point2, 4>& a, const std::array<Point2, 4>& b, Mat3& out) {
  double m[8][9];
  for (int i = 0; i < 4; ++i) {
    const double x = a[i].x, y = a[i].y, u = b[i].x, v = b[i].y;
    double r0[9] = {x, y, 1, 0, 0, 0, -u * x, -u * y, u};
    double r1[9] = {0, 0, 0, x, y, 1, -v * x, -v * y, v};
    std::copy(r0, r0 + 9, m[2 * i]);
    std::copy(r1, r1 + 9, m[2 * i + 1]);
  }
  for (int col = 0; col < 8; ++col) {
    int piv = col;
    for (int r = col + 1; r < 8; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    if (std::abs(m[piv][col]) < 1e-12) return false;
    if (piv != col)
      for (int c = 0; c < 9; ++c) std::swap(m[piv][c], m[col][c]);
    for (int r = col + 1; r < 8; ++r) {
      const double f = m[r][col] / m[col][col];
      for (int c = col; c < 9; ++c) m[r][c] -= f * m[col][c];
    }
  }
  double h[8];
  for (int r = 7; r >= 0; --r) {
    double acc = m[r][8];
    for (int c = r + 1; c < 8; ++c) acc -= m[r][c] * h[c];
    h[r] = acc / m[r][r];
  }
  out << h[0], h[1], h[2], h[3], h[4], h[5], h[6], h[7], 1.0;
  return true;
}

bool acceptable(const Homography& h) {
  if (h.degenerate()) return false;
  const double det2 = h(0, 0) * h(1, 1) - h(0, 1) * h(1, 0);
  return std::isfinite(det2) && std::abs(det2) > 1e-12;
}

int score(const Homography& h, std::span<const Point2> a, std::span<const Point2> b, double thresh,
          std::vector<bool>* mask) {
  const Homography inv = h.inverse();
  if (inv.degenerate()) return 0;
  int count = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool in = symmetric_transfer_error(h, inv, a[i], b[i]) < thresh;
    if (mask) (*mask)[i] = in;
    count += in;
  }
  return count;
}

}  // namespace

Homography Homography::identity() {
  Homography h;
  h.degenerate_ = false;
  return h;
}

Homography Homography::degenerate_marker() { return Homography{}; }

Homography Homography::from_matrix(const std::array<double, 9>& m) {
  Homography h;
  if (!(std::abs(m[8]) > 1e-15)) return h;
  for (int i = 0; i < 9; ++i) {
    h.m_[i] = m[i] / m[8];
    if (!std::isfinite(h.m_[i])) return Homography{};
  }
  h.m_[8] = 1.0;
  h.degenerate_ = false;
  return h;
}

bool Homography::apply(Point2 p, Point2& out) const noexcept {
  const double w = m_[6] * p.x + m_[7] * p.y + m_[8];
  if (std::abs(w) < 1e-12) return false;
  out = {(m_[0] * p.x + m_[1] * p.y + m_[2]) / w, (m_[3] * p.x + m_[4] * p.y + m_[5]) / w};
  return true;
}

Homography Homography::inverse() const {
  if (degenerate_) return Homography{};
  const Mat3 m = to_eigen(*this);
  const double det = m.determinant();
  if (!std::isfinite(det) || std::abs(det) < 1e-15) return Homography{};
  return from_eigen(m.inverse());
}

double Homography::max_abs_diff(const Homography& other) const noexcept {
  double d = 0;
  for (int i = 0; i < 9; ++i) d = std::max(d, std::abs(m_[i] - other.m_[i]));
  return d;
}

double symmetric_transfer_error(const Homography& h, const Homography& h_inv, Point2 a, Point2 b) {
  Point2 fa, bb;
  if (!h.apply(a, fa) || !h_inv.apply(b, bb)) return std::numeric_limits<double>::infinity();
  const double fwd = (fa.x - b.x) * (fa.x - b.x) + (fa.y - b.y) * (fa.y - b.y);
  const double bwd = (bb.x - a.x) * (bb.x - a.x) + (bb.y - a.y) * (bb.y - a.y);
  return std::sqrt(0.5 * (fwd + bwd));
}

Homography fit_homography_dlt(std::span<const Point2> a, std::span<const Point2> b) {
  if (a.size() != b.size() || a.size() < 4) {
    throw Error(ErrorCode::NotEnoughMatches, "DLT needs at least 4 correspondences");
  }
  const Mat3 ta = normalizer(a), tb = normalizer(b);
  Eigen::MatrixXd A(2 * a.size(), 9);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Point2 p = transform(ta, a[i]), q = transform(tb, b[i]);
    A.row(2 * i) << -p.x, -p.y, -1, 0, 0, 0, q.x * p.x, q.x * p.y, q.x;
    A.row(2 * i + 1) << 0, 0, 0, -p.x, -p.y, -1, q.y * p.x, q.y * p.y, q.y;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const Eigen::VectorXd h = svd.matrixV().col(8);
  Mat3 hn;
  hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  return from_eigen(tb.inverse() * hn * ta);
}

RansacResult estimate_homography_ransac(std::span<const Point2> a, std::span<const Point2> b,
                                        const RansacConfig& cfg, std::uint64_t seed) {
  if (a.size() != b.size()) throw Error(ErrorCode::ShapeError, "point lists differ in length");
  if (a.size() < 4) throw Error(ErrorCode::NotEnoughMatches, "RANSAC needs at least 4 correspondences");
  const std::size_t n = a.size();
  const Mat3 ta = normalizer(a), tb = normalizer(b);
  const Mat3 tb_inv = tb.inverse();
  std::vector<Point2> na(n), nb(n);
  for (std::size_t i = 0; i < n; ++i) {
    na[i] = transform(ta, a[i]);
    nb[i] = transform(tb, b[i]);
  }

  Rng rng(seed);
  Homography best;
  int best_count = -1;
  long long limit = cfg.max_iters;
  for (long long it = 0; it < limit; ++it) {
    std::array<std::size_t, 4> idx{};
    for (int k = 0; k < 4; ++k) {
      bool dup;
      do {
        idx[k] = static_cast<std::size_t>(uniform_index(rng, n));
        dup = std::find(idx.begin(), idx.begin() + k, idx[k]) != idx.begin() + k;
      } while (dup);
    }
    std::array<Point2, 4> sa{}, sb{};
    for (int k = 0; k < 4; ++k) {
      sa[k] = na[idx[k]];
      sb[k] = nb[idx[k]];
    }
    if (any_three_collinear(sa) || any_three_collinear(sb)) continue;
    Mat3 hn;
    if (!solve_four_point(sa, sb, hn)) continue;
    const Homography h = from_eigen(tb_inv * hn * ta);
    if (!acceptable(h)) continue;
    const int count = score(h, a, b, cfg.reproj_thresh, nullptr);
    if (count > best_count) {
      best_count = count;
      best = h;
      const double w = static_cast<double>(count) / n;
      if (w >= 1.0) {
        limit = std::min<long long>(limit, it + 1);
      } else if (w > 0.0) {
        const double denom = std::log(1.0 - std::pow(w, 4));
        if (denom < 0) {
          const double need = std::ceil(std::log(1.0 - cfg.confidence) / denom);
          if (need < static_cast<double>(limit)) limit = std::max<long long>(it + 1, static_cast<long long>(need));
        }
      }
    }
  }
  if (best_count < 0) throw Error(ErrorCode::DegenerateGeometry, "every RANSAC sample was degenerate");

  RansacResult result;
  result.inlier_mask.assign(n, false);
  result.homography = best;
  result.inlier_count = score(best, a, b, cfg.reproj_thresh, &result.inlier_mask);

  // Refit over the consensus set; keep the refit only if it does not lose support.
  for (int round = 0; round < 2 && result.inlier_count >= 4; ++round) {
    std::vector<Point2> ia, ib;
    for (std::size_t i = 0; i < n; ++i)
      if (result.inlier_mask[i]) {
        ia.push_back(a[i]);
        ib.push_back(b[i]);
      }
    const Homography refit = fit_homography_dlt(ia, ib);
    if (!acceptable(refit)) break;
    std::vector<bool> mask(n, false);
    const int count = score(refit, a, b, cfg.reproj_thresh, &mask);
    if (count < result.inlier_count) break;
    result.homography = refit;
    result.inlier_mask = std::move(mask);
    const bool grew = count > result.inlier_count;
    result.inlier_count = count;
    if (!grew) break;
  }
  return result;
}

FilteredMatches filter_matches(std::span<const Match> matches, std::span<const kp::Keypoint> query_kps,
                               std::span<const kp::Keypoint> train_kps, const RansacConfig& cfg,
                               std::uint64_t seed) {
  FilteredMatches out;
  if (matches.size() < 4) return out;
  std::vector<Point2> a, b;
  a.reserve(matches.size());
  b.reserve(matches.size());
  for (const auto& m : matches) {
    a.push_back({query_kps[m.query_idx].x, query_kps[m.query_idx].y});
    b.push_back({train_kps[m.train_idx].x, train_kps[m.train_idx].y});
  }
  try {
    auto r = estimate_homography_ransac(a, b, cfg, seed);
    out.homography = r.homography;
    for (std::size_t i = 0; i < matches.size(); ++i)
      if (r.inlier_mask[i]) out.inliers.push_back(matches[i]);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateGeometry) throw;
  }
  return out;
}

}  // namespace trinket::match
