#pragma once

namespace stpinn {

struct LossWeights {
    double residual = 1.0;
    double initial = 1.0;
    double boundary = 1.0;

    /// All finite and >= 0, not all zero. Throws UsageError otherwise.
    void validate() const;

    bool operator==(const LossWeights&) const = default;
};

} // namespace stpinn
