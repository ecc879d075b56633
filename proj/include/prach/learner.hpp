#pragma once

#include "prach/classifier.hpp"

#include <memory>

namespace prach {

// A classifier whose training set grows by absorbing rows of a fixed pool.
// Sessions for kNN and ridge ELM update incrementally; other kinds refit.
class LearnerSession {
public:
    virtual ~LearnerSession() = default;
    // Moves pool rows into the training set with the given labels.
    virtual void add(std::span<const std::size_t> pool_rows, std::span<const Label> labels) = 0;
    // Posterior of the current model at the given pool rows.
    virtual Posterior pool_posterior(std::span<const std::size_t> pool_rows) = 0;
    virtual TrainedModel model() = 0;
    virtual std::size_t train_size() const = 0;
};

// incremental=false forces the refit-every-time session for any kind.
std::unique_ptr<LearnerSession> make_session(const ClassifierSpec& spec, const Matrix& train_x,
                                             std::span<const Label> train_y, const Matrix& pool_x,
                                             bool incremental = true);

}  // namespace prach
