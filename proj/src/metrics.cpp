#include "interrate/metrics.hpp"
#include "interrate/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace interrate {

namespace {

// Neumaier summation, so reductions stay stable across cell orderings.
class CompensatedSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            carry_ += (sum_ - t) + v;
        } else {
            carry_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    [[nodiscard]] double value() const { return sum_ + carry_; }

private:
    double sum_{0.0};
    double carry_{0.0};
};

double frequency(const ObservationCell& c) {
    return static_cast<double>(c.contagions) / static_cast<double>(c.total);
}

// a log(a / b), with 0 log 0 = 0.
double kl_term(double a, double b) {
    return a > 0.0 ? a * std::log(a / b) : 0.0;
}

} // namespace

double rss(const Predictor& predictor, const ObservationSet& obs) {
    CompensatedSum sum;
    for (const auto& c : obs.cells()) {
        if (c.total == 0) {
            continue;
        }
        const double diff = frequency(c) - predictor.predict(c.target, c.source, c.gap);
        sum.add(diff * diff);
    }
    return sum.value();
}

double bernoulli_js(double f, double p) {
    const double m1 = 0.5 * (f + p);
    const double m0 = 0.5 * ((1.0 - f) + (1.0 - p));
    const double kl_f = kl_term(f, m1) + kl_term(1.0 - f, m0);
    const double kl_p = kl_term(p, m1) + kl_term(1.0 - p, m0);
    return std::clamp(0.5 * (kl_f + kl_p), 0.0, std::numbers::ln2);
}

double js_divergence(const Predictor& predictor, const ObservationSet& obs) {
    CompensatedSum weighted;
    double weight = 0.0;
    for (const auto& c : obs.cells()) {
        if (c.total == 0) {
            continue;
        }
        const auto n = static_cast<double>(c.total);
        weighted.add(n * bernoulli_js(frequency(c), predictor.predict(c.target, c.source, c.gap)));
        weight += n;
    }
    return weight > 0.0 ? weighted.value() / weight : 0.0;
}

double bcf1(const Predictor& predictor, const ObservationSet& obs) {
    CompensatedSum tp;
    CompensatedSum fp;
    CompensatedSum fn;
    for (const auto& c : obs.cells()) {
        if (c.total == 0) {
            continue;
        }
        const auto n = static_cast<double>(c.total);
        const double f = frequency(c);
        const double p = predictor.predict(c.target, c.source, c.gap);
        tp.add(n * std::min(p, f));
        fp.add(n * std::max(p - f, 0.0));
        fn.add(n * std::max(f - p, 0.0));
    }
    const double denom = 2.0 * tp.value() + fp.value() + fn.value();
    return denom > 0.0 ? 2.0 * tp.value() / denom : 1.0;
}

double mse_beta(const BetaMatrix& fitted, const BetaMatrix& truth, MissingPairs missing) {
    if (!(fitted.kernel() == truth.kernel()) || fitted.entity_count() != truth.entity_count() ||
        truth.size() == 0) {
        throw Error("incomparable matrices");
    }
    CompensatedSum sum;
    std::size_t count = 0;
    for (const auto& [key, expected] : truth.entries()) {
        const auto* actual = fitted.find(key.first, key.second);
        if (actual == nullptr && missing == MissingPairs::Reject) {
            throw Error("incomparable matrices");
        }
        for (std::size_t k = 0; k < expected.size(); ++k) {
            const double diff = (actual != nullptr ? (*actual)[k] : 0.0) - expected[k];
            sum.add(diff * diff);
        }
        count += expected.size();
    }
    return sum.value() / static_cast<double>(count);
}

EvalReport evaluate(const Predictor& predictor, const ObservationSet& obs) {
    EvalReport report;
    report.rss = rss(predictor, obs);
    report.js_divergence = js_divergence(predictor, obs);
    report.bcf1 = bcf1(predictor, obs);
    report.cell_count = obs.cells().size();
    return report;
}

} // namespace interrate
