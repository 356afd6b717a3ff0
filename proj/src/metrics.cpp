#include "mvi/metrics.hpp"

#include "mvi/errors.hpp"

#include <cmath>

namespace mvi {

std::vector<bool> support_mask(const ComplexGrid& image, double threshold)
{
    std::vector<bool> m(image.size());
    for (std::size_t i = 0; i < image.size(); ++i) m[i] = std::abs(image[i]) > threshold;
    return m;
}

double support_f1(const std::vector<bool>& estimate, const std::vector<bool>& truth)
{
    require(estimate.size() == truth.size(), "support masks differ in size");
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        tp += estimate[i] && truth[i];
        fp += estimate[i] && !truth[i];
        fn += !estimate[i] && truth[i];
    }
    if (tp + fp + fn == 0) return 1.0;
    return 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
}

double complex_correlation(const ComplexGrid& a, const ComplexGrid& b)
{
    require(a.same_shape(b), "grids differ in shape");
    cplx dot{};
    double na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * std::conj(b[i]);
        na += std::norm(a[i]);
        nb += std::norm(b[i]);
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return std::abs(dot) / std::sqrt(na * nb);
}

double residual_energy(const ComplexGrid& image, const ComplexGrid& oracle)
{
    require(image.same_shape(oracle), "grids differ in shape");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < image.size(); ++i) {
        num += std::norm(image[i] - oracle[i]);
        den += std::norm(oracle[i]);
    }
    if (den == 0.0) throw NumericError("residual energy against an all-zero oracle");
    return num / den;
}

double max_relative_error(const ComplexGrid& a, const ComplexGrid& b)
{
    require(a.same_shape(b), "grids differ in shape");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double e = std::abs(a[i] - b[i]);
        double r = std::abs(b[i]);
        worst = std::max(worst, r > 0.0 ? e / r : e);
    }
    return worst;
}

} // namespace mvi
