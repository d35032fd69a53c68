#pragma once

#include <vector>

namespace tspe {

// A text or audio representation of fixed per-backend dimension.
struct Embedding {
    std::vector<double> values;
    bool normalized = false;

    std::size_t dimension() const { return values.size(); }
    bool operator==(const Embedding&) const = default;
};

double l2_norm(const Embedding& e);

// Returns the unit-length copy; throws ZeroVector when the norm is < 1e-12.
Embedding normalize(const Embedding& e);

double dot(const Embedding& a, const Embedding& b);
double cosine(const Embedding& a, const Embedding& b);

}  // namespace tspe
