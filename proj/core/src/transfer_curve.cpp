#include <algorithm>
#include <cmath>
#include <limits>

#include "pinsim/device.hpp"
#include "pinsim/error.hpp"
#include "pinsim/math.hpp"

namespace pinsim {

std::vector<TransferPoint> measure_transfer_curve(const NeuronSimConfig& cfg,
                                                  const DeviceConstants& consts,
                                                  const DeviceParams& params,
                                                  std::size_t windows_per_point,
                                                  const std::vector<double>& grid, Rng& rng) {
    cfg.validate(params);
    require(windows_per_point >= 2, "need at least two windows per grid point");
    std::vector<TransferPoint> points;
    points.reserve(grid.size());
    Magnetization m = Magnetization::random(rng);
    for (double v : grid) {
        double sum = 0.0;
        double sum_sq = 0.0;
        for (std::size_t w = 0; w < windows_per_point; ++w) {
            const auto r = simulate_neuron_window(v, cfg, consts, params, m, rng, false);
            m = r.final_state;
            sum += r.mean_output;
            sum_sq += r.mean_output * r.mean_output;
        }
        const double n = static_cast<double>(windows_per_point);
        const double mean = sum / n;
        const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
        points.push_back(TransferPoint{v, mean, std::sqrt(var), 0.0});
    }
    return points;
}

namespace {

double sum_squares(const std::vector<TransferPoint>& pts, double v0, double slope) {
    double s = 0.0;
    for (const auto& p : pts) {
        const double r = p.mean_output - sigmoid(slope * (p.v_in - v0));
        s += r * r;
    }
    return s;
}

}  // namespace

SigmoidFit fit_sigmoid(std::vector<TransferPoint>& points) {
    require(points.size() >= 3, "sigmoid fit needs at least three points");
    std::sort(points.begin(), points.end(),
              [](const auto& a, const auto& b) { return a.v_in < b.v_in; });

    for (std::size_t i = 1; i < points.size(); ++i) {
        const auto& a = points[i - 1];
        const auto& b = points[i];
        const double slack = 3.0 * std::hypot(a.std_output, b.std_output);
        if (b.mean_output < a.mean_output - std::max(slack, 1e-3))
            throw Error(ErrorCategory::Runtime, "transfer curve is not monotone beyond noise");
    }

    const double span = points.back().v_in - points.front().v_in;
    require(span > 0.0, "grid must span a voltage range");

    // Coarse search seeds Levenberg-Marquardt away from flat regions.
    double v0 = points.front().v_in;
    double slope = 1.0 / span;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 100; ++i) {
        const double cv = points.front().v_in + span * i / 100.0;
        for (int k = 0; k <= 60; ++k) {
            const double cs = std::pow(10.0, k / 20.0) / span;  // 1/span .. 1000/span
            const double s = sum_squares(points, cv, cs);
            if (s < best) { best = s; v0 = cv; slope = cs; }
        }
    }

    double lambda = 1e-3;
    for (int iter = 0; iter < 200; ++iter) {
        Eigen::Matrix2d jtj = Eigen::Matrix2d::Zero();
        Eigen::Vector2d jtr = Eigen::Vector2d::Zero();
        for (const auto& p : points) {
            const double f = sigmoid(slope * (p.v_in - v0));
            const double df = f * (1.0 - f);
            const Eigen::Vector2d j(-slope * df, (p.v_in - v0) * df);
            const double r = p.mean_output - f;
            jtj += j * j.transpose();
            jtr += j * r;
        }
        bool improved = false;
        for (int attempt = 0; attempt < 20 && !improved; ++attempt) {
            Eigen::Matrix2d a = jtj;
            a.diagonal() *= 1.0 + lambda;
            a.diagonal().array() += 1e-15;
            const Eigen::Vector2d step = a.ldlt().solve(jtr);
            const double s = sum_squares(points, v0 + step[0], slope + step[1]);
            if (std::isfinite(s) && s <= best && slope + step[1] > 0.0) {
                const double gain = best - s;
                v0 += step[0];
                slope += step[1];
                best = s;
                lambda = std::max(lambda / 3.0, 1e-12);
                improved = true;
                if (gain < 1e-16) iter = 200;
            } else {
                lambda *= 4.0;
            }
        }
        if (!improved) break;
    }
    if (!std::isfinite(v0) || !std::isfinite(slope) || slope <= 0.0)
        throw Error(ErrorCategory::Runtime, "sigmoid fit did not converge");

    SigmoidFit fit{v0, slope, 0.0};
    for (auto& p : points) {
        p.fit_value = fit.probability(p.v_in);
        fit.max_residual = std::max(fit.max_residual, std::abs(p.mean_output - p.fit_value));
    }
    return fit;
}

TransferCurve fit_transfer_curve(const NeuronSimConfig& cfg, const DeviceConstants& consts,
                                 const DeviceParams& params, std::size_t windows_per_point,
                                 const std::vector<double>& grid, Rng& rng) {
    require(grid.size() >= 3, "transfer curve grid needs at least three points");
    TransferCurve curve;
    curve.windows_per_point = windows_per_point;
    curve.points = measure_transfer_curve(cfg, consts, params, windows_per_point, grid, rng);
    // The monotonicity check compares means, so scale the slack to standard errors.
    std::vector<TransferPoint> scaled = curve.points;
    const double root_n = std::sqrt(static_cast<double>(windows_per_point));
    for (auto& p : scaled) p.std_output /= root_n;
    curve.fit = fit_sigmoid(scaled);
    for (std::size_t i = 0; i < curve.points.size(); ++i) curve.points[i].fit_value = scaled[i].fit_value;
    return curve;
}

}  // namespace pinsim
