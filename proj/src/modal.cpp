#include "pmuf/modal.hpp"

#include <Eigen/Dense>
#include <lapacke.h>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "pmuf/error.hpp"

namespace pmuf {

void validate(const PencilConfig& cfg) {
  if (!(cfg.step_s > 0.0) || !(cfg.window_s > cfg.step_s)) {
    fail(ErrorCode::InvalidSpec, "pencil window must exceed the step, and the step must be positive");
  }
  if (!(cfg.pencil_ratio > 0.0) || cfg.pencil_ratio > 0.5) {
    fail(ErrorCode::InvalidSpec, "pencil_ratio must lie in (0, 0.5]");
  }
  if (!(cfg.sv_threshold > 0.0) || !(cfg.sv_threshold < 1.0)) {
    fail(ErrorCode::InvalidSpec, "sv_threshold must lie in (0, 1)");
  }
  if (cfg.max_model_order < 1) fail(ErrorCode::InvalidSpec, "max_model_order must be at least 1");
  if (!(cfg.min_magnitude_frac >= 0.0) || cfg.min_magnitude_frac > 1.0) {
    fail(ErrorCode::InvalidSpec, "min_magnitude_frac must lie in [0, 1]");
  }
}

std::string_view to_string(BandLabel band) noexcept {
  switch (band) {
    case BandLabel::SubSynchronousLow: return "sub_synchronous_low";
    case BandLabel::Electromechanical: return "electromechanical";
    case BandLabel::Control: return "control";
  }
  return "electromechanical";
}

namespace {

using Complex = std::complex<double>;

constexpr double kMaxLogGrowth = 600.0;

double damping_ratio(double sigma, double omega) {
  const double radius = std::hypot(sigma, omega);
  if (radius == 0.0) return 0.0;
  return std::clamp(-sigma / radius, -1.0, 1.0);
}

}  // namespace

std::vector<ModeEstimate> estimate_modes(std::span<const double> samples, double rate_fps,
                                         const PencilConfig& cfg) {
  validate(cfg);
  if (!(rate_fps > 0.0)) fail(ErrorCode::InvalidSpec, "rate_fps must be positive");
  const auto n = static_cast<Eigen::Index>(samples.size());
  if (n < 3) fail(ErrorCode::TooFewSamples, "matrix pencil needs at least 3 samples");
  const auto pencil = static_cast<Eigen::Index>(std::floor(cfg.pencil_ratio * static_cast<double>(n)));
  if (pencil < 1) {
    fail(ErrorCode::TooFewSamples, "window of " + std::to_string(n) + " samples gives a zero pencil parameter");
  }

  Eigen::VectorXd x(n);
  double mean = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    x[i] = samples[static_cast<std::size_t>(i)];
    if (!std::isfinite(x[i])) fail(ErrorCode::InvalidArgument, "matrix pencil input must be gap-free");
    mean += x[i];
  }
  mean /= static_cast<double>(n);
  x.array() -= mean;
  if (x.cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, std::abs(mean))) return {};

  // Gram matrix of the (n - L) x (L + 1) Hankel data matrix. Its
  // eigenvectors are the right singular vectors of the Hankel matrix, and
  // the Hankel structure gives each diagonal by a running update.
  const Eigen::Index rows = n - pencil;
  const Eigen::Index dim = pencil + 1;
  Eigen::MatrixXd gram(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) gram(0, j) = x.segment(0, rows).dot(x.segment(j, rows));
  for (Eigen::Index i = 1; i < dim; ++i) {
    for (Eigen::Index j = i; j < dim; ++j) {
      gram(i, j) = gram(i - 1, j - 1) - x[i - 1] * x[j - 1] + x[rows + i - 1] * x[rows + j - 1];
    }
  }
  gram.triangularView<Eigen::StrictlyLower>() = gram.transpose();

  const Eigen::Tridiagonalization<Eigen::MatrixXd> tri(gram);
  Eigen::VectorXd diag = tri.diagonal();
  Eigen::VectorXd sub = tri.subDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> values;
  values.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (values.info() != Eigen::Success) {
    fail(ErrorCode::NumericalFailure, "eigenvalues of the data Gram matrix did not converge");
  }
  // Ascending eigenvalues: the dominant subspace is at the right end.
  const Eigen::VectorXd& lambda = values.eigenvalues();
  const double sv_max = std::sqrt(std::max(lambda[dim - 1], 0.0));
  Eigen::Index order = 0;
  while (order < dim && std::sqrt(std::max(lambda[dim - 1 - order], 0.0)) >= cfg.sv_threshold * sv_max) {
    ++order;
  }
  order = std::min({order, pencil, static_cast<Eigen::Index>(cfg.max_model_order)});
  if (order == 0) return {};

  // Eigenvectors for the retained eigenvalues only, by inverse iteration on
  // the tridiagonal form, then mapped back through the Householder reflectors.
  Eigen::VectorXd wanted = lambda.tail(order);
  std::vector<lapack_int> block(static_cast<std::size_t>(order), 1);
  lapack_int split = static_cast<lapack_int>(dim);
  std::vector<lapack_int> failed(static_cast<std::size_t>(order));
  Eigen::MatrixXd z_tri(dim, order);
  const lapack_int info = LAPACKE_dstein(LAPACK_COL_MAJOR, static_cast<lapack_int>(dim), diag.data(), sub.data(),
                                         static_cast<lapack_int>(order), wanted.data(), block.data(), &split,
                                         z_tri.data(), static_cast<lapack_int>(dim), failed.data());
  if (info != 0) {
    // Tight clusters can defeat inverse iteration; fall back to the full
    // tridiagonal QL solve.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> full;
    full.computeFromTridiagonal(tri.diagonal(), tri.subDiagonal(), Eigen::ComputeEigenvectors);
    if (full.info() != Eigen::Success) {
      fail(ErrorCode::NumericalFailure, "eigenvectors of the data Gram matrix did not converge");
    }
    z_tri = full.eigenvectors().rightCols(order);
  }
  z_tri.applyOnTheLeft(tri.matrixQ());
  const Eigen::MatrixXd v = z_tri.rowwise().reverse();

  const Eigen::MatrixXd v1 = v.topRows(pencil);
  const Eigen::MatrixXd v2 = v.bottomRows(pencil);
  const Eigen::MatrixXd pencil_matrix = v1.completeOrthogonalDecomposition().solve(v2);

  Eigen::EigenSolver<Eigen::MatrixXd> eig(pencil_matrix, /*computeEigenvectors=*/false);
  if (eig.info() != Eigen::Success) {
    fail(ErrorCode::NumericalFailure, "eigenvalue iteration of the reduced pencil did not converge");
  }
  // Poles of a real pencil come in exact conjugate pairs; the upper member
  // stands for the pair.
  std::vector<Complex> poles;
  poles.reserve(static_cast<std::size_t>(order));
  for (Eigen::Index k = 0; k < order; ++k) {
    const Complex z = eig.eigenvalues()[k];
    if (z.imag() < 0.0) continue;
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || std::abs(z) == 0.0) continue;
    // Spurious poles far off the unit circle overflow z^n over the window.
    if (std::abs(std::log(std::abs(z))) * static_cast<double>(n - 1) > kMaxLogGrowth) continue;
    poles.push_back(z);
  }
  if (poles.empty()) return {};

  // Residues by real least squares: a pair contributes Re(z^i) and Im(z^i)
  // columns, a real pole one column. Columns are equilibrated so growing and
  // decaying poles share one scale.
  std::vector<Eigen::Index> first_col;
  Eigen::Index cols = 0;
  for (const Complex& z : poles) {
    first_col.push_back(cols);
    cols += z.imag() > 0.0 ? 2 : 1;
  }
  Eigen::MatrixXd basis(n, cols);
  Eigen::VectorXd scale(cols);
  for (std::size_t k = 0; k < poles.size(); ++k) {
    const Complex z = poles[k];
    const Eigen::Index c = first_col[k];
    const bool pair = z.imag() > 0.0;
    Complex power(1.0, 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
      basis(i, c) = power.real();
      if (pair) basis(i, c + 1) = power.imag();
      power *= z;
    }
    const double peak = std::max(1.0, std::pow(std::abs(z), static_cast<double>(n - 1)));
    scale[c] = 1.0 / peak;
    basis.col(c) *= scale[c];
    if (pair) {
      scale[c + 1] = scale[c];
      basis.col(c + 1) *= scale[c];
    }
  }
  Eigen::VectorXd coef = basis.colPivHouseholderQr().solve(x);
  coef.array() *= scale.array();
  if (!coef.allFinite()) fail(ErrorCode::NumericalFailure, "residue fit produced non-finite values");

  std::vector<ModeEstimate> modes;
  for (std::size_t k = 0; k < poles.size(); ++k) {
    const Complex z = poles[k];
    const Eigen::Index c = first_col[k];
    const bool pair = z.imag() > 0.0;
    // x_i = 2 Re(r z^i) = a Re(z^i) + b Im(z^i) gives r = (a - j b) / 2.
    const Complex r = pair ? Complex(coef[c], -coef[c + 1]) / 2.0 : Complex(coef[c], 0.0);
    const Complex s = std::log(z) * rate_fps;
    ModeEstimate mode;
    mode.decay_rate = s.real();
    mode.frequency_hz = std::abs(s.imag()) / (2.0 * std::numbers::pi);
    mode.damping_factor = damping_ratio(s.real(), s.imag());
    mode.phase_rad = std::arg(r);
    // A real positive pole is non-oscillatory; a real negative pole sits at
    // Nyquist. Both lack a conjugate partner.
    mode.magnitude = pair ? 2.0 * std::abs(r) : std::abs(r);
    modes.push_back(mode);
  }
  std::stable_sort(modes.begin(), modes.end(), [](const ModeEstimate& a, const ModeEstimate& b) {
    return a.magnitude > b.magnitude;
  });
  if (!modes.empty()) {
    const double cutoff = cfg.min_magnitude_frac * modes.front().magnitude;
    std::erase_if(modes, [cutoff](const ModeEstimate& mode) { return mode.magnitude < cutoff; });
  }
  return modes;
}

std::vector<double> reconstruct(std::span<const ModeEstimate> modes, std::size_t n, double rate_fps) {
  std::vector<double> out(n, 0.0);
  for (const auto& mode : modes) {
    const double omega = 2.0 * std::numbers::pi * mode.frequency_hz;
    const bool nyquist = mode.frequency_hz >= rate_fps / 2.0;
    const bool oscillatory = mode.frequency_hz > 0.0 && !nyquist;
    const double amplitude = oscillatory ? mode.magnitude : mode.magnitude * std::cos(mode.phase_rad);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / rate_fps;
      out[i] += amplitude * std::exp(mode.decay_rate * t) * std::cos(omega * t + (oscillatory ? mode.phase_rad : 0.0));
    }
  }
  return out;
}

ModeTrack sliding_modal_scan(const ChannelSeries& series, const PencilConfig& cfg) {
  validate(cfg);
  const double rate = series.spec().rate_fps;
  const auto window_len = static_cast<std::size_t>(std::llround(cfg.window_s * rate));
  if (window_len < 3 || window_len > series.size()) {
    fail(ErrorCode::TooFewSamples, "series of " + std::to_string(series.size()) +
                                       " samples cannot hold one " + std::to_string(cfg.window_s) +
                                       " s window");
  }
  ModeTrack track;
  track.config = cfg;
  std::vector<double> buffer(window_len);
  for (std::size_t k = 0;; ++k) {
    const double start_s = static_cast<double>(k) * cfg.step_s;
    const auto first = static_cast<std::size_t>(std::llround(start_s * rate));
    if (first + window_len > series.size()) break;
    ModeWindow window;
    window.start_s = start_s;
    for (std::size_t i = 0; i < window_len; ++i) {
      if (series.missing(first + i)) {
        window.skipped = true;
        break;
      }
      buffer[i] = series.value(first + i);
    }
    if (!window.skipped) {
      window.modes = estimate_modes(buffer, rate, cfg);
      for (auto& mode : window.modes) mode.window_start_s = start_s;
    }
    track.windows.push_back(std::move(window));
  }
  return track;
}

BandLabel classify_band(const ModeEstimate& mode) {
  if (mode.frequency_hz < 0.15) return BandLabel::SubSynchronousLow;
  if (mode.frequency_hz <= 1.0) return BandLabel::Electromechanical;
  return BandLabel::Control;
}

std::vector<double> flag_disturbance_windows(const ModeTrack& track, std::size_t mode_count_threshold,
                                             double low_freq_hz) {
  std::vector<double> flagged;
  for (const auto& window : track.windows) {
    if (window.skipped) continue;
    const auto low = std::count_if(window.modes.begin(), window.modes.end(), [&](const ModeEstimate& mode) {
      return mode.frequency_hz > 0.0 && mode.frequency_hz < low_freq_hz;
    });
    if (static_cast<std::size_t>(low) >= mode_count_threshold) flagged.push_back(window.start_s);
  }
  return flagged;
}

}  // namespace pmuf
