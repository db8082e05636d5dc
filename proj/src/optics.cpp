#include "qwalk/optics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include <Eigen/Core>
#include <Eigen/Dense>
#include <unsupported/Eigen/LevenbergMarquardt>

#include "qwalk/errors.hpp"
#include "qwalk/parallel.hpp"

namespace qw {
namespace {

// Spots beyond this many 1/e² radii contribute below e^-50 and are skipped.
constexpr double kSpotCutoff = 5.0;

std::array<double, 2> rotate(std::array<double, 2> v, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * v[0] - s * v[1], s * v[0] + c * v[1]};
}

CameraImage blank_image(const RasterSpec& r) {
  require(r.nx > 0 && r.ny > 0, "raster must have positive size");
  require(r.pixel > 0.0, "pixel pitch must be positive");
  CameraImage img;
  img.nx = r.nx;
  img.ny = r.ny;
  img.pixel = r.pixel;
  img.origin_x = r.centre_x - 0.5 * (r.nx - 1) * r.pixel;
  img.origin_y = r.centre_y - 0.5 * (r.ny - 1) * r.pixel;
  img.data.assign(static_cast<std::size_t>(r.nx) * r.ny, 0.0);
  return img;
}

// Pixel index range [lo, hi) covering centre ± half on one axis.
std::pair<int, int> pixel_span(double origin, double pixel, int n, double centre, double half) {
  const int lo = std::max(0, static_cast<int>(std::ceil((centre - half - origin) / pixel)));
  const int hi = std::min(n, static_cast<int>(std::floor((centre + half - origin) / pixel)) + 1);
  return {lo, std::max(lo, hi)};
}

// Power of a unit spot at (x, y) that falls outside the raster.
double outside_fraction(const CameraImage& img, double x, double y, double w) {
  // Pixels sample the intensity at their centres; each covers ± pixel/2.
  const double k = std::sqrt(2.0) / w;
  auto inside = [k](double lo, double hi, double c) {
    return 0.5 * (std::erf(k * (hi - c)) - std::erf(k * (lo - c)));
  };
  const double h = 0.5 * img.pixel;
  const double fx = inside(img.x(0) - h, img.x(img.nx - 1) + h, x);
  const double fy = inside(img.y(0) - h, img.y(img.ny - 1) + h, y);
  return 1.0 - fx * fy;
}

struct SpotFit : Eigen::DenseFunctor<double> {
  // params: amplitude, x0, y0, w (pixel units); I = A exp(-2 r²/w²)
  const std::vector<double>& xs;
  const std::vector<double>& ys;
  const std::vector<double>& vals;

  SpotFit(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& v)
      : Eigen::DenseFunctor<double>(4, static_cast<int>(v.size())), xs(x), ys(y), vals(v) {}

  int operator()(const InputType& p, ValueType& f) const {
    for (std::size_t k = 0; k < vals.size(); ++k) {
      const double dx = xs[k] - p(1), dy = ys[k] - p(2);
      f(k) = p(0) * std::exp(-2.0 * (dx * dx + dy * dy) / (p(3) * p(3))) - vals[k];
    }
    return 0;
  }

  int df(const InputType& p, JacobianType& j) const {
    const double w2 = p(3) * p(3);
    for (std::size_t k = 0; k < vals.size(); ++k) {
      const double dx = xs[k] - p(1), dy = ys[k] - p(2);
      const double r2 = dx * dx + dy * dy;
      const double e = std::exp(-2.0 * r2 / w2);
      j(k, 0) = e;
      j(k, 1) = p(0) * e * 4.0 * dx / w2;
      j(k, 2) = p(0) * e * 4.0 * dy / w2;
      j(k, 3) = p(0) * e * 4.0 * r2 / (w2 * p(3));
    }
    return 0;
  }
};

// Sub-pixel centre of the spot nearest to the brightest pixel in [i0, i1) x [j0, j1).
std::array<double, 2> fit_spot(const CameraImage& img, int i0, int i1, int j0, int j1, int half,
                               double w_guess) {
  int bi = i0, bj = j0;
  double best = -1.0;
  for (int j = j0; j < j1; ++j)
    for (int i = i0; i < i1; ++i)
      if (img.at(i, j) > best) {
        best = img.at(i, j);
        bi = i;
        bj = j;
      }
  if (!(best > 0.0)) fail(ErrorKind::FitDivergence, "no spot found in the search region");

  std::vector<double> xs, ys, vals;
  for (int j = std::max(0, bj - half); j <= std::min(img.ny - 1, bj + half); ++j)
    for (int i = std::max(0, bi - half); i <= std::min(img.nx - 1, bi + half); ++i) {
      xs.push_back(i);
      ys.push_back(j);
      vals.push_back(img.at(i, j) / best);
    }
  if (vals.size() < 8) fail(ErrorKind::FitDivergence, "spot fit window too small");

  SpotFit functor(xs, ys, vals);
  Eigen::LevenbergMarquardt<SpotFit> lm(functor);
  lm.setMaxfev(400);
  Eigen::VectorXd p(4);
  p << 1.0, bi, bj, w_guess;
  const auto status = lm.minimize(p);
  const bool converged = status != Eigen::LevenbergMarquardtSpace::ImproperInputParameters &&
                         status != Eigen::LevenbergMarquardtSpace::TooManyFunctionEvaluation;
  if (!converged || !p.allFinite() || std::abs(p(1) - bi) > half || std::abs(p(2) - bj) > half ||
      p(3) <= 0.0)
    fail(ErrorKind::FitDivergence, "Gaussian spot fit did not converge");
  return {img.x(0) + p(1) * img.pixel, img.y(0) + p(2) * img.pixel};
}

}  // namespace

void OpticalConfig::validate() const {
  require(wavelength > 0.0 && waist > 0.0 && period > 0.0 && focal_length > 0.0 &&
              plate_distance >= 0.0,
          "optical lengths must be positive (plate distance may be zero)");
}

double OpticalConfig::rayleigh_range() const { return kPi * waist * waist / wavelength; }
double OpticalConfig::delta_k() const { return kTwoPi / period; }
double OpticalConfig::site_pitch() const { return focal_length * wavelength / period; }
bool OpticalConfig::ideal_regime(double setup_length) const {
  return rayleigh_range() >= 10.0 * setup_length;
}

double GaussianMode::rayleigh_range() const { return kPi * waist * waist / wavelength; }

double GaussianMode::radius(double z) const {
  const double r = z / rayleigh_range();
  return waist * std::sqrt(1.0 + r * r);
}

double GaussianMode::curvature(double z) const {
  if (z == 0.0) return std::numeric_limits<double>::infinity();
  const double r = rayleigh_range() / z;
  return z * (1.0 + r * r);
}

double GaussianMode::gouy(double z) const { return std::atan(z / rayleigh_range()); }

GaussianMode gaussian_mode(Site m, const OpticalConfig& config) {
  config.validate();
  return {m, config.waist, config.wavelength, {config.delta_k() * m.x, config.delta_k() * m.y}};
}

std::array<double, 2> camera_position(std::array<double, 2> k, const OpticalConfig& config) {
  const double scale = config.focal_length * config.wavelength / kTwoPi;
  return {scale * k[0], scale * k[1]};
}

std::array<double, 2> camera_position(Site m, const OpticalConfig& config) {
  const std::array<double, 2> k{config.delta_k() * m.x, config.delta_k() * m.y};
  return camera_position(k, config);
}

std::array<double, 2> k_perp_from_camera(std::array<double, 2> r, const OpticalConfig& config) {
  const double scale = kTwoPi / (config.focal_length * config.wavelength);
  return {scale * r[0], scale * r[1]};
}

double spot_radius(const OpticalConfig& config) {
  return config.focal_length * config.wavelength / (kPi * config.waist);
}

double sigma_for_beam_radius(double w_g, const OpticalConfig& config) {
  require(w_g > 0.0, "beam radius must be positive");
  return config.period / (kPi * w_g);
}

ModeOverlap adjacent_mode_overlap(const OpticalConfig& config) {
  config.validate();
  const double a = config.site_pitch();
  const double w = spot_radius(config);
  ModeOverlap o;
  o.amplitude = std::exp(-a * a / (2.0 * w * w));
  o.power = std::exp(-a * a / (w * w));
  // Intensity is a Gaussian of standard deviation w/2 per axis; the
  // neighbour's box spans [a/2, 3a/2] along the separation and ±a/2 across it.
  const double k = 1.0 / (std::sqrt(2.0) * 0.5 * w);
  const double across = std::erf(0.5 * a * k);
  const double along = 0.5 * (std::erf(1.5 * a * k) - std::erf(0.5 * a * k));
  o.box_leakage = along * across;
  return o;
}

double CameraImage::total() const {
  double s = 0.0;
  for (double v : data) s += v;
  return s;
}

CameraImage render_focal_plane(const Distribution& d, const OpticalConfig& config,
                               const RasterSpec& raster) {
  config.validate();
  CameraImage img = blank_image(raster);
  const double w = spot_radius(config);
  const double cut = kSpotCutoff * w;
  const double norm = 2.0 / (kPi * w * w) * img.pixel * img.pixel;

  struct Spot {
    double x, y, p;
  };
  std::vector<Spot> spots;
  const Window& win = d.window;
  for (int y = win.y_min; y <= win.y_max; ++y)
    for (int x = win.x_min; x <= win.x_max; ++x) {
      const double p = d.at(x, y);
      if (p <= 0.0) continue;
      const auto r = rotate(camera_position(Site{x, y}, config), raster.tilt);
      spots.push_back({r[0], r[1], p});
    }

  parallel_for(static_cast<std::size_t>(img.ny), [&](std::size_t jj) {
    const int j = static_cast<int>(jj);
    const double py = img.y(j);
    double* row = img.data.data() + static_cast<std::size_t>(j) * img.nx;
    for (const Spot& s : spots) {
      const double dy = py - s.y;
      if (std::abs(dy) > cut) continue;
      const double gy = s.p * norm * std::exp(-2.0 * dy * dy / (w * w));
      const auto [i0, i1] = pixel_span(img.origin_x, img.pixel, img.nx, s.x, cut);
      for (int i = i0; i < i1; ++i) {
        const double dx = img.x(i) - s.x;
        row[i] += gy * std::exp(-2.0 * dx * dx / (w * w));
      }
    }
  });
  double power = 0.0, lost = 0.0;
  for (const Spot& s : spots) {
    power += s.p;
    lost += s.p * outside_fraction(img, s.x, s.y, w);
  }
  img.clipped_fraction = power > 0.0 ? lost / power : 0.0;
  return img;
}

CameraImage render_focal_plane(const WalkerState& psi, const OpticalConfig& config,
                               const RasterSpec& raster) {
  config.validate();
  CameraImage img = blank_image(raster);
  const double w = spot_radius(config);
  const double cut = kSpotCutoff * w;
  const double amp = std::sqrt(2.0 / (kPi * w * w)) * img.pixel;

  struct Spot {
    double x, y;
    cplx a[2];
  };
  std::vector<Spot> spots;
  const Window& win = psi.window();
  for (int y = win.y_min; y <= win.y_max; ++y)
    for (int x = win.x_min; x <= win.x_max; ++x) {
      const cplx l = psi.amplitude(x, y, 0), r = psi.amplitude(x, y, 1);
      if (l == cplx{} && r == cplx{}) continue;
      const auto pos = rotate(camera_position(Site{x, y}, config), raster.tilt);
      spots.push_back({pos[0], pos[1], {l, r}});
    }

  parallel_for(static_cast<std::size_t>(img.ny), [&](std::size_t jj) {
    const int j = static_cast<int>(jj);
    const double py = img.y(j);
    std::vector<cplx> field(2 * static_cast<std::size_t>(img.nx), cplx{});
    for (const Spot& s : spots) {
      const double dy = py - s.y;
      if (std::abs(dy) > cut) continue;
      const double gy = amp * std::exp(-dy * dy / (w * w));
      const auto [i0, i1] = pixel_span(img.origin_x, img.pixel, img.nx, s.x, cut);
      for (int i = i0; i < i1; ++i) {
        const double dx = img.x(i) - s.x;
        const double g = gy * std::exp(-dx * dx / (w * w));
        field[2 * i] += g * s.a[0];
        field[2 * i + 1] += g * s.a[1];
      }
    }
    double* row = img.data.data() + static_cast<std::size_t>(j) * img.nx;
    for (int i = 0; i < img.nx; ++i) row[i] = std::norm(field[2 * i]) + std::norm(field[2 * i + 1]);
  });
  // Cross terms between neighbouring spots are ignored here.
  double power = 0.0, lost = 0.0;
  for (const Spot& s : spots) {
    const double p = std::norm(s.a[0]) + std::norm(s.a[1]);
    power += p;
    lost += p * outside_fraction(img, s.x, s.y, w);
  }
  img.clipped_fraction = power > 0.0 ? lost / power : 0.0;
  return img;
}

double image_diameter(const CameraImage& image) {
  double s = 0.0, sx = 0.0, sy = 0.0;
  for (int j = 0; j < image.ny; ++j)
    for (int i = 0; i < image.nx; ++i) {
      const double v = image.at(i, j);
      s += v;
      sx += v * image.x(i);
      sy += v * image.y(j);
    }
  if (!(s > 0.0)) fail(ErrorKind::InvalidArgument, "empty image");
  const double mx = sx / s, my = sy / s;
  double vx = 0.0, vy = 0.0;
  for (int j = 0; j < image.ny; ++j)
    for (int i = 0; i < image.nx; ++i) {
      const double v = image.at(i, j);
      vx += v * (image.x(i) - mx) * (image.x(i) - mx);
      vy += v * (image.y(j) - my) * (image.y(j) - my);
    }
  // I ∝ exp(-2r²/W²) has standard deviation W/2 per axis; diameter 2W.
  return 2.0 * (std::sqrt(vx / s) + std::sqrt(vy / s));
}

std::array<double, 2> SiteGrid::position(int mx, int my) const {
  return {origin[0] + mx * a_x[0] + my * a_y[0], origin[1] + mx * a_x[1] + my * a_y[1]};
}

namespace {

double box_half_width(const std::array<double, 2>& ax, const std::array<double, 2>& ay) {
  // Half the smallest Chebyshev distance between lattice neighbours keeps
  // axis-aligned boxes disjoint for any lattice orientation.
  double m = std::numeric_limits<double>::infinity();
  for (int i = -1; i <= 1; ++i)
    for (int j = -1; j <= 1; ++j) {
      if (i == 0 && j == 0) continue;
      const double dx = i * ax[0] + j * ay[0], dy = i * ax[1] + j * ay[1];
      m = std::min(m, std::max(std::abs(dx), std::abs(dy)));
    }
  return 0.5 * m;
}

}  // namespace

SiteGrid analytic_site_grid(const OpticalConfig& config, int max_order, double tilt) {
  config.validate();
  require(max_order >= 0, "max_order must be non-negative");
  SiteGrid g;
  g.max_order = max_order;
  g.a_x = rotate(camera_position(Site{1, 0}, config), tilt);
  g.a_y = rotate(camera_position(Site{0, 1}, config), tilt);
  g.box_half_width = box_half_width(g.a_x, g.a_y);
  return g;
}

SiteGrid calibrate_sites(const OpticalConfig& config, int max_order,
                         const CalibrationOptions& options) {
  config.validate();
  require(max_order >= 1, "calibration needs max_order >= 1");
  const RasterSpec& raster = options.raster;
  const double pitch_px = config.site_pitch() / raster.pixel;
  const int half = options.fit_half_window > 0
                       ? options.fit_half_window
                       : std::max(3, static_cast<int>(std::floor(0.5 * pitch_px)));
  const double w_px = spot_radius(config) / raster.pixel;

  // Spot records: lattice index and fitted camera position.
  struct Obs {
    int mx, my;
    std::array<double, 2> r;
  };
  std::vector<Obs> obs;

  const Spinor h = coin::H();
  for (Axis axis : {Axis::X, Axis::Y}) {
    StepProtocol calib;
    calib.name = axis == Axis::X ? "U_x" : "U_y";
    calib.plates = {PlateDescriptor::uniform(kPi, 0.0), PlateDescriptor::grating(axis, kPi, 0.0)};
    WalkerState psi = localized_state(Site{0, 0}, h);
    for (int t = 0; t <= max_order; ++t) {
      if (t > 0) psi = evolve(psi, calib, 1);
      if (axis == Axis::Y && t == 0) continue;  // origin frame already recorded
      const CameraImage img = render_focal_plane(distribution(psi), config, raster);
      if (img.clipped_fraction > 1e-3)
        fail(ErrorKind::InvalidArgument, "calibration spots fall outside the raster");
      // Centre pixel of the raster and the expected spot direction split the
      // frame into two halves, one per spot.
      const int ci = img.nx / 2, cj = img.ny / 2;
      if (t == 0) {
        obs.push_back({0, 0, fit_spot(img, 0, img.nx, 0, img.ny, half, w_px)});
        continue;
      }
      for (int sign : {+1, -1}) {
        int i0 = 0, i1 = img.nx, j0 = 0, j1 = img.ny;
        if (axis == Axis::X)
          (sign > 0 ? i0 : i1) = ci;
        else
          (sign > 0 ? j0 : j1) = cj;
        const auto r = fit_spot(img, i0, i1, j0, j1, half, w_px);
        obs.push_back(axis == Axis::X ? Obs{sign * t, 0, r} : Obs{0, sign * t, r});
      }
    }
  }

  // r = origin + mx a_x + my a_y, least squares per camera coordinate.
  Eigen::MatrixXd A(obs.size(), 3);
  Eigen::MatrixXd b(obs.size(), 2);
  for (std::size_t k = 0; k < obs.size(); ++k) {
    A.row(k) << 1.0, obs[k].mx, obs[k].my;
    b.row(k) << obs[k].r[0], obs[k].r[1];
  }
  const Eigen::MatrixXd sol = A.colPivHouseholderQr().solve(b);
  SiteGrid g;
  g.max_order = max_order;
  g.origin = {sol(0, 0), sol(0, 1)};
  g.a_x = {sol(1, 0), sol(1, 1)};
  g.a_y = {sol(2, 0), sol(2, 1)};
  g.box_half_width = box_half_width(g.a_x, g.a_y);
  return g;
}

namespace {

// Box power of every site in [-M, M]², unnormalized, in window site order.
std::vector<double> box_powers(const CameraImage& image, const SiteGrid& grid) {
  const int M = grid.max_order;
  const int n = 2 * M + 1;
  std::vector<double> out(static_cast<std::size_t>(n) * n, 0.0);
  const double h = grid.box_half_width;
  require(h > 0.0, "site grid has no integration box");
  for (int my = -M; my <= M; ++my)
    for (int mx = -M; mx <= M; ++mx) {
      const auto c = grid.position(mx, my);
      if (c[0] - h < image.x(0) || c[0] + h > image.x(image.nx - 1) || c[1] - h < image.y(0) ||
          c[1] + h > image.y(image.ny - 1))
        fail(ErrorKind::InvalidArgument, "integration box extends beyond the raster");
      // Half-open on the upper side so neighbouring boxes never share a pixel.
      const auto [i0, i1] = pixel_span(image.origin_x, image.pixel, image.nx, c[0], h);
      const auto [j0, j1] = pixel_span(image.origin_y, image.pixel, image.ny, c[1], h);
      double s = 0.0;
      for (int j = j0; j < j1; ++j)
        for (int i = i0; i < i1; ++i) {
          if (image.x(i) >= c[0] + h || image.y(j) >= c[1] + h) continue;
          s += image.at(i, j);
        }
      out[static_cast<std::size_t>(my + M) * n + (mx + M)] = s;
    }
  return out;
}

}  // namespace

Distribution extract_distribution(const CameraImage& image, const SiteGrid& grid) {
  std::vector<double> p = box_powers(image, grid);
  double total = 0.0;
  for (double v : p) total += v;
  if (!(total > 0.0)) fail(ErrorKind::InvalidArgument, "image holds no power inside the site boxes");
  for (double& v : p) v /= total;
  const int M = grid.max_order;
  return make_distribution(Window{-M, M, -M, M}, std::move(p));
}

double boxed_power_fraction(const CameraImage& image, const SiteGrid& grid) {
  const double total = image.total();
  if (!(total > 0.0)) fail(ErrorKind::InvalidArgument, "empty image");
  double s = 0.0;
  for (double v : box_powers(image, grid)) s += v;
  return s / total;
}

void write_pgm16(const std::string& path, const CameraImage& image,
                 const std::vector<std::string>& comments) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot open " + path + " for writing");
  double peak = 0.0;
  for (double v : image.data) peak = std::max(peak, v);
  out << "P5\n";
  for (const auto& c : comments) out << "# " << c << "\n";
  char buf[160];
  std::snprintf(buf, sizeof buf, "# pixel %.9g m, origin %.9g %.9g m, peak %.9g, top row = max y\n",
                image.pixel, image.origin_x, image.origin_y, peak);
  out << buf << image.nx << " " << image.ny << "\n65535\n";
  std::vector<unsigned char> row(2 * static_cast<std::size_t>(image.nx));
  for (int j = image.ny - 1; j >= 0; --j) {
    for (int i = 0; i < image.nx; ++i) {
      const double v = peak > 0.0 ? image.at(i, j) / peak : 0.0;
      const auto q = static_cast<unsigned>(std::lround(std::clamp(v, 0.0, 1.0) * 65535.0));
      row[2 * i] = static_cast<unsigned char>(q >> 8);
      row[2 * i + 1] = static_cast<unsigned char>(q & 0xff);
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
  if (!out) fail(ErrorKind::Io, "write failed for " + path);
}

}  // namespace qw
