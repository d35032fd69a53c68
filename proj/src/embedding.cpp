#include "tspe/embedding.hpp"

#include <cmath>

#include "tspe/errors.hpp"

namespace tspe {

double l2_norm(const Embedding& e) {
    double sum = 0.0;
    for (double v : e.values) sum += v * v;
    return std::sqrt(sum);
}

Embedding normalize(const Embedding& e) {
    const double norm = l2_norm(e);
    if (norm < 1e-12) throw ZeroVector("cannot normalize a vector with norm < 1e-12");
    Embedding out;
    out.values.reserve(e.values.size());
    for (double v : e.values) out.values.push_back(v / norm);
    out.normalized = true;
    return out;
}

double dot(const Embedding& a, const Embedding& b) {
    if (a.dimension() != b.dimension())
        throw DimensionMismatch("dot: dimensions " + std::to_string(a.dimension()) + " vs " +
                                std::to_string(b.dimension()));
    double sum = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) sum += a.values[i] * b.values[i];
    return sum;
}

double cosine(const Embedding& a, const Embedding& b) {
    const double na = l2_norm(a);
    const double nb = l2_norm(b);
    if (na < 1e-12 || nb < 1e-12) throw ZeroVector("cosine of a vector with norm < 1e-12");
    return dot(a, b) / (na * nb);
}

}  // namespace tspe
