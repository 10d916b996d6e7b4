#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cursim {

/// Thrown when an argument violates an operation's precondition.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown by file ingestion (missing file, ragged rows, bad cells, label mismatch).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The intersection submatrix does not carry the rank of the source matrix.
class RankDeficientSelection : public std::runtime_error {
public:
    RankDeficientSelection(std::size_t rank_u, std::size_t rank_a)
        : std::runtime_error("rank-deficient selection: rank(U) = " + std::to_string(rank_u) +
                             " < rank(A) = " + std::to_string(rank_a)),
          rank_u_(rank_u),
          rank_a_(rank_a) {}

    std::size_t rank_u() const noexcept { return rank_u_; }
    std::size_t rank_a() const noexcept { return rank_a_; }

private:
    std::size_t rank_u_;
    std::size_t rank_a_;
};

/// No rank-sufficient row/column selection was found within the retry budget.
class SelectionFailed : public std::runtime_error {
public:
    static constexpr std::size_t kNoTrial = static_cast<std::size_t>(-1);

    explicit SelectionFailed(std::size_t attempts, std::size_t trial = kNoTrial)
        : std::runtime_error(make_message(attempts, trial)), attempts_(attempts), trial_(trial) {}

    std::size_t attempts() const noexcept { return attempts_; }
    std::size_t trial() const noexcept { return trial_; }

private:
    static std::string make_message(std::size_t attempts, std::size_t trial) {
        std::string msg = "selection failed after " + std::to_string(attempts) + " attempt(s)";
        if (trial != kNoTrial) msg += " in trial " + std::to_string(trial);
        return msg;
    }

    std::size_t attempts_;
    std::size_t trial_;
};

}  // namespace cursim
