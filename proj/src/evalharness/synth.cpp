#include "trinket/evalharness/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "trinket/common/error.hpp"
#include "trinket/common/file_io.hpp"
#include "trinket/common/rng.hpp"
#include "trinket/imgcore/image_io.hpp"
#include "trinket/keypoints/orb.hpp"

namespace trinket::eval {
namespace {

constexpr int kTex = 256;  // texture side; the disc fills it
constexpr double kPi = std::numbers::pi;

struct Pt {
  double x, y;
};

class Texture {
 public:
  explicit Texture(double fill) : v_(kTex * kTex, fill) {}
  double& at(int x, int y) { return v_[static_cast<std::size_t>(y) * kTex + x]; }
  double at(int x, int y) const { return v_[static_cast<std::size_t>(y) * kTex + x]; }

  double sample(double x, double y) const {
    x = std::clamp(x, 0.0, kTex - 1.001);
    y = std::clamp(y, 0.0, kTex - 1.001);
    const int x0 = static_cast<int>(x), y0 = static_cast<int>(y);
    const double fx = x - x0, fy = y - y0;
    return (1 - fx) * (1 - fy) * at(x0, y0) + fx * (1 - fy) * at(x0 + 1, y0) + (1 - fx) * fy * at(x0, y0 + 1) +
           fx * fy * at(x0 + 1, y0 + 1);
  }

  // Convex polygon fill by half-plane tests.
  void polygon(const std::vector<Pt>& p, double value) {
    double minx = kTex, miny = kTex, maxx = 0, maxy = 0;
    for (const auto& q : p) {
      minx = std::min(minx, q.x);
      maxx = std::max(maxx, q.x);
      miny = std::min(miny, q.y);
      maxy = std::max(maxy, q.y);
    }
    double area = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const auto& a = p[i];
      const auto& b = p[(i + 1) % p.size()];
      area += a.x * b.y - b.x * a.y;
    }
    const double sign = area >= 0 ? 1 : -1;
    for (int y = std::max(0, static_cast<int>(miny)); y <= std::min(kTex - 1, static_cast<int>(maxy)); ++y)
      for (int x = std::max(0, static_cast<int>(minx)); x <= std::min(kTex - 1, static_cast<int>(maxx)); ++x) {
        bool inside = true;
        for (std::size_t i = 0; i < p.size() && inside; ++i) {
          const auto& a = p[i];
          const auto& b = p[(i + 1) % p.size()];
          inside = sign * ((b.x - a.x) * (y - a.y) - (b.y - a.y) * (x - a.x)) >= 0;
        }
        if (inside) at(x, y) = value;
      }
  }

  void disc(double cx, double cy, double r, double value) {
    for (int y = std::max(0, static_cast<int>(cy - r)); y <= std::min(kTex - 1, static_cast<int>(cy + r)); ++y)
      for (int x = std::max(0, static_cast<int>(cx - r)); x <= std::min(kTex - 1, static_cast<int>(cx + r)); ++x)
        if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) at(x, y) = value;
  }

  void stroke(Pt a, Pt b, double width, double value) {
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len = std::max(1e-9, std::hypot(dx, dy));
    const double nx = -dy / len * width / 2, ny = dx / len * width / 2;
    polygon({{a.x + nx, a.y + ny}, {b.x + nx, b.y + ny}, {b.x - nx, b.y - ny}, {a.x - nx, a.y - ny}}, value);
  }

 private:
  std::vector<double> v_;
};

// Gray level far enough from `avoid` to give a visible edge.
double contrasting(Rng& rng, double avoid) {
  for (;;) {
    const double v = uniform_real(rng, 10, 245);
    if (std::abs(v - avoid) > 50) return v;
  }
}

Pt rnd_pt(Rng& rng, double margin = 0) {
  return {uniform_real(rng, margin, kTex - margin), uniform_real(rng, margin, kTex - margin)};
}

std::vector<Pt> rotated_rect(Pt c, double w, double h, double angle) {
  const double ca = std::cos(angle), sa = std::sin(angle);
  std::vector<Pt> out;
  for (auto [sx, sy] : {std::pair{-1, -1}, {1, -1}, {1, 1}, {-1, 1}})
    out.push_back({c.x + ca * sx * w / 2 - sa * sy * h / 2, c.y + sa * sx * w / 2 + ca * sy * h / 2});
  return out;
}

void scatter_blocks(Texture& t, Rng& rng, int n, double base, double min_size, double max_size) {
  for (int i = 0; i < n; ++i)
    t.polygon(rotated_rect(rnd_pt(rng), uniform_real(rng, min_size, max_size), uniform_real(rng, min_size, max_size),
                           uniform_real(rng, 0, kPi)),
              contrasting(rng, base));
}

Texture make_texture(int category, Rng& rng) {
  const double base = uniform_real(rng, 30, 225);
  Texture t(base);
  switch (category) {
    case 0:  // blocks
      scatter_blocks(t, rng, 45, base, 14, 60);
      break;
    case 1: {  // stripes: two crossing families of bands plus a few blocks
      for (int fam = 0; fam < 2; ++fam) {
        const double ang = uniform_real(rng, 0, kPi);
        const double ca = std::cos(ang), sa = std::sin(ang);
        double off = -kTex;
        while (off < kTex) {
          const double w = uniform_real(rng, 6, 22);
          const Pt c{kTex / 2.0 + ca * off, kTex / 2.0 + sa * off};
          if (uniform_index(rng, 2)) t.polygon(rotated_rect(c, w, 3 * kTex, ang), contrasting(rng, base));
          off += w + uniform_real(rng, 8, 30);
        }
      }
      scatter_blocks(t, rng, 8, base, 12, 30);
      break;
    }
    case 2:  // dots
      for (int i = 0; i < 70; ++i) {
        const auto c = rnd_pt(rng);
        t.disc(c.x, c.y, uniform_real(rng, 4, 20), contrasting(rng, base));
      }
      scatter_blocks(t, rng, 6, base, 10, 24);
      break;
    case 3:  // glyphs: thick strokes in letter-like groups
      for (int g = 0; g < 16; ++g) {
        const auto c = rnd_pt(rng, 20);
        const double v = contrasting(rng, base);
        Pt p = c;
        const int strokes = 2 + static_cast<int>(uniform_index(rng, 3));
        for (int s = 0; s < strokes; ++s) {
          const double a = uniform_real(rng, 0, 2 * kPi), len = uniform_real(rng, 15, 40);
          const Pt q{p.x + std::cos(a) * len, p.y + std::sin(a) * len};
          t.stroke(p, q, uniform_real(rng, 5, 10), v);
          p = q;
        }
      }
      break;
    case 4: {  // irregular checkerboard with random cell grays, rotated
      const double cell = uniform_real(rng, 24, 40);
      const double ang = uniform_real(rng, 0, kPi / 2);
      const double ca = std::cos(ang), sa = std::sin(ang);
      for (int i = -8; i < 8; ++i)
        for (int j = -8; j < 8; ++j) {
          if (uniform_index(rng, 3) == 0) continue;
          const Pt c{kTex / 2.0 + ca * i * cell - sa * j * cell, kTex / 2.0 + sa * i * cell + ca * j * cell};
          t.polygon(rotated_rect(c, cell * 0.92, cell * 0.92, ang), contrasting(rng, base));
        }
      scatter_blocks(t, rng, 5, base, 10, 20);
      break;
    }
    default:  // mosaic of triangles
      for (int i = 0; i < 60; ++i) {
        const auto c = rnd_pt(rng);
        std::vector<Pt> tri;
        for (int k = 0; k < 3; ++k) {
          const double a = uniform_real(rng, 0, 2 * kPi), r = uniform_real(rng, 10, 36);
          tri.push_back({c.x + std::cos(a) * r, c.y + std::sin(a) * r});
        }
        t.polygon(tri, contrasting(rng, base));
      }
      break;
  }
  return t;
}

struct View {
  double angle = 0;   // radians
  double scale = 1;
  double gain = 1;
  double cx = 0, cy = 0;  // disc center in the frame
};

View random_view(Rng& rng, const SynthConfig& cfg) {
  View v;
  v.angle = uniform_real(rng, -cfg.max_rotation_deg, cfg.max_rotation_deg) * kPi / 180;
  v.scale = 1 + uniform_real(rng, -cfg.max_scale, cfg.max_scale);
  v.gain = 1 + uniform_real(rng, -cfg.max_brightness, cfg.max_brightness);
  v.cx = (cfg.width - 1) / 2.0 + uniform_real(rng, -cfg.max_shift, cfg.max_shift);
  v.cy = (cfg.height - 1) / 2.0 + uniform_real(rng, -cfg.max_shift, cfg.max_shift);
  return v;
}

// Smooth low-contrast background: base gray plus two slow waves.
std::vector<double> background(int w, int h, Rng& rng) {
  const double base = uniform_real(rng, 70, 180);
  const double a1 = uniform_real(rng, 4, 12), a2 = uniform_real(rng, 4, 12);
  const double f1 = uniform_real(rng, 0.005, 0.02), f2 = uniform_real(rng, 0.005, 0.02);
  const double t1 = uniform_real(rng, 0, kPi), t2 = uniform_real(rng, 0, kPi);
  const double p1 = uniform_real(rng, 0, 2 * kPi), p2 = uniform_real(rng, 0, 2 * kPi);
  std::vector<double> bg(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      bg[static_cast<std::size_t>(y) * w + x] =
          base + a1 * std::sin(f1 * (std::cos(t1) * x + std::sin(t1) * y) * 2 * kPi + p1) +
          a2 * std::sin(f2 * (std::cos(t2) * x + std::sin(t2) * y) * 2 * kPi + p2);
  return bg;
}

// Composites the texture disc into `canvas` (row-major doubles) with 2x2
// supersampling.
void draw_disc(std::vector<double>& canvas, int w, int h, const Texture& tex, const View& v, double diameter) {
  const double px_per_tex = diameter * v.scale / kTex;
  const double radius = diameter * v.scale / 2;
  const double ca = std::cos(v.angle), sa = std::sin(v.angle);
  const int x0 = std::max(0, static_cast<int>(v.cx - radius - 2)), x1 = std::min(w - 1, static_cast<int>(v.cx + radius + 2));
  const int y0 = std::max(0, static_cast<int>(v.cy - radius - 2)), y1 = std::min(h - 1, static_cast<int>(v.cy + radius + 2));
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) {
      double acc = 0;
      int hits = 0;
      for (double oy : {-0.25, 0.25})
        for (double ox : {-0.25, 0.25}) {
          const double dx = x + ox - v.cx, dy = y + oy - v.cy;
          if (dx * dx + dy * dy > radius * radius) continue;
          // inverse rotation into texture space
          const double u = (ca * dx + sa * dy) / px_per_tex + kTex / 2.0;
          const double t = (-sa * dx + ca * dy) / px_per_tex + kTex / 2.0;
          acc += tex.sample(u, t);
          ++hits;
        }
      if (!hits) continue;
      double& c = canvas[static_cast<std::size_t>(y) * w + x];
      c = (c * (4 - hits) + acc) / 4;
    }
}

img::GrayImage finish(const std::vector<double>& canvas, int w, int h, double gain, double noise, Rng& rng) {
  img::GrayImage out(w, h);
  for (std::size_t i = 0; i < canvas.size(); ++i) {
    const double v = canvas[i] * gain + noise * standard_normal(rng);
    out.pixels()[i] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
  }
  return out;
}

img::GrayImage render(const Texture& tex, const View& v, const SynthConfig& cfg, Rng& rng) {
  auto canvas = background(cfg.width, cfg.height, rng);
  draw_disc(canvas, cfg.width, cfg.height, tex, v, cfg.diameter);
  return finish(canvas, cfg.width, cfg.height, v.gain, cfg.noise_sigma, rng);
}

std::string view_id(const std::string& trinket, int view) { return trinket + "_v" + std::to_string(view) + ".png"; }

}  // namespace

void SynthCorpus::add_to(ImageBank& bank) const {
  for (const auto& im : images) bank.add(im.id, im.image);
  for (const auto& im : negative_images) bank.add(im.id, im.image);
}

void SynthCorpus::write(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  for (const auto* list : {&images, &negative_images})
    for (const auto& im : *list) img::write_png(im.image, dir / im.id);
  write_manifest(corpus, dir / "manifest.csv");
  write_manifest(TrinketCorpus{negatives, dir}, dir / "negatives.csv");
}

SynthCorpus synth_corpus(const SynthConfig& cfg) {
  if (cfg.n_trinkets < 10 || cfg.n_trinkets % 10 != 0)
    throw Error(ErrorCode::ShapeError, "synthetic corpus size must be a positive multiple of 10");
  SynthCorpus out;
  for (int i = 0; i < cfg.n_trinkets; ++i) {
    Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(i)));
    const int category = i % static_cast<int>(kSynthCategories.size());
    const auto tex = make_texture(category, rng);
    char name[16];
    std::snprintf(name, sizeof name, "t%03d", i);
    TrinketEntry e{name, std::string(kSynthCategories[category]), {}};
    for (int v = 0; v < 4; ++v) {
      e.images[v] = view_id(name, v);
      out.images.push_back({e.images[v], render(tex, random_view(rng, cfg), cfg, rng)});
    }
    out.corpus.trinkets.push_back(std::move(e));
  }

  // Negatives: a plain disc and a heavily blurred textured disc, three each.
  for (int i = 0; i < 6; ++i) {
    Rng rng(mix_seed(cfg.seed ^ 0x6e656761746976ULL, static_cast<std::uint64_t>(i)));
    const bool plain = i < 3;
    const auto tex = plain ? Texture(uniform_real(rng, 30, 225)) : make_texture(i % 6, rng);
    char name[16];
    std::snprintf(name, sizeof name, "%s%d", plain ? "plain" : "blurry", i % 3);
    TrinketEntry e{name, plain ? "plain" : "blurry", {}};
    for (int v = 0; v < 4; ++v) {
      e.images[v] = view_id(name, v);
      auto im = render(tex, random_view(rng, cfg), cfg, rng);
      if (!plain) im = img::gaussian_blur(im, 9.0);
      out.negative_images.push_back({e.images[v], std::move(im)});
    }
    out.negatives.push_back(std::move(e));
  }
  return out;
}

std::vector<SynthImage> synth_distractors(int n, std::uint64_t seed, std::vector<std::string>* categories,
                                          const SynthConfig& cfg) {
  std::vector<SynthImage> out;
  if (categories) categories->clear();
  for (int i = 0; i < n; ++i) {
    Rng rng(mix_seed(seed ^ 0x64697374726163ULL, static_cast<std::uint64_t>(i)));
    const int category = static_cast<int>(uniform_index(rng, kSynthCategories.size()));
    char name[16];
    std::snprintf(name, sizeof name, "d%04d.png", i);
    auto canvas = background(cfg.width, cfg.height, rng);
    // One or more objects; multi-object scenes stand in for cluttered photos.
    const int objects = uniform_index(rng, 4) == 0 ? 2 + static_cast<int>(uniform_index(rng, 3)) : 1;
    for (int k = 0; k < objects; ++k) {
      const auto tex = make_texture(k == 0 ? category : static_cast<int>(uniform_index(rng, 6)), rng);
      View v = random_view(rng, cfg);
      if (objects > 1) {
        v.scale = uniform_real(rng, 0.35, 0.6);
        v.cx = uniform_real(rng, 40, cfg.width - 40);
        v.cy = uniform_real(rng, 40, cfg.height - 40);
      }
      draw_disc(canvas, cfg.width, cfg.height, tex, v, cfg.diameter);
    }
    out.push_back({name, finish(canvas, cfg.width, cfg.height, 1 + uniform_real(rng, -cfg.max_brightness, cfg.max_brightness),
                                cfg.noise_sigma, rng)});
    if (categories) categories->push_back(std::string(kSynthCategories[category]));
  }
  return out;
}

SynthImage clutter_fixture(const SynthCorpus& synth, std::span<const std::size_t> trinkets, int view,
                           std::uint64_t seed) {
  if (view < 0 || view > 3) throw Error(ErrorCode::ShapeError, "view index out of range");
  if (trinkets.empty()) throw Error(ErrorCode::ShapeError, "clutter fixture needs at least one trinket");
  const int w = sim::kCanonicalWidth, h = sim::kCanonicalHeight;
  Rng rng(seed);
  const auto fill = static_cast<std::uint8_t>(uniform_index(rng, 60) + 100);
  const int cols = 2;
  const int rows = static_cast<int>((trinkets.size() + cols - 1) / cols);
  const int tw = w / cols, th = h / rows;

  // Native-scale crops of the textured centers, stretched to full range.
  std::vector<img::GrayImage> pieces;
  for (auto t : trinkets) {
    const auto& entry = synth.corpus.trinkets.at(t);
    const auto it = std::find_if(synth.images.begin(), synth.images.end(),
                                 [&](const SynthImage& s) { return s.id == entry.images[view]; });
    if (it == synth.images.end()) throw Error(ErrorCode::ShapeError, "trinket has no rendered view");
    auto piece = img::crop_center(it->image, tw, th);
    const auto [lo, hi] = std::minmax_element(piece.pixels().begin(), piece.pixels().end());
    const int a = *lo, b = *hi;
    if (b > a)
      for (auto& v : piece.pixels()) v = static_cast<std::uint8_t>(std::lround((v - a) * 255.0 / (b - a)));
    pieces.push_back(std::move(piece));
  }

  auto render = [&](const std::vector<double>& gain) {
    img::GrayImage out(w, h, fill);
    for (std::size_t k = 0; k < pieces.size(); ++k) {
      const int ox = static_cast<int>(k % cols) * tw, oy = static_cast<int>(k / cols) * th;
      for (int y = 0; y < th; ++y)
        for (int x = 0; x < tw; ++x)
          out.at(ox + x, oy + y) = static_cast<std::uint8_t>(std::lround(128 + (pieces[k].at(x, y) - 128) * gain[k]));
    }
    return out;
  };
  auto tile_counts = [&](const img::GrayImage& im) {
    std::vector<int> n(pieces.size(), 0);
    for (const auto& k : kp::orb_detect_and_compute(im).keypoints) {
      const auto t = static_cast<std::size_t>(std::min(rows - 1, static_cast<int>(k.y) / th) * cols +
                                              std::min(cols - 1, static_cast<int>(k.x) / tw));
      if (t < n.size()) ++n[t];
    }
    return n;
  };

  // The detector keeps a global top-N, so a few high-contrast tiles would
  // take most keypoints. Damp them until every tile gets a fair share.
  std::vector<double> gain(pieces.size(), 1.0);
  auto best = render(gain);
  int best_min = -1;
  for (int iter = 0; iter < 12; ++iter) {
    const auto im = render(gain);
    const auto n = tile_counts(im);
    const int lo = *std::min_element(n.begin(), n.end());
    if (lo > best_min) {
      best_min = lo;
      best = im;
    }
    const double share = static_cast<double>(std::accumulate(n.begin(), n.end(), 0)) / n.size();
    for (std::size_t k = 0; k < gain.size(); ++k)
      gain[k] *= std::clamp(std::pow(share / std::max(1, n[k]), 0.25), 0.7, 1.4);
    const double top = *std::max_element(gain.begin(), gain.end());
    for (auto& g : gain) g /= top;
  }
  return {"clutter.png", best};
}

}  // namespace trinket::eval
