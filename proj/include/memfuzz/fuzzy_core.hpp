#pragma once

// Finite-valued fuzzy sets and fuzzy multisets with exact grades.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace memfuzz {

/// A truth value in [0,1], stored as a reduced fraction. Comparisons are exact.
class Grade {
public:
    constexpr Grade() = default;
    Grade(std::int64_t numerator, std::int64_t denominator = 1);

    static Grade zero() { return Grade{}; }
    static Grade one() { return Grade{1, 1}; }

    /// Accepts "0", "1", "p/q" and plain decimals such as "0.25".
    static Grade parse(std::string_view text);

    [[nodiscard]] std::int64_t numerator() const { return num_; }
    [[nodiscard]] std::int64_t denominator() const { return den_; }
    [[nodiscard]] bool is_zero() const { return num_ == 0; }
    [[nodiscard]] bool is_one() const { return num_ == den_; }
    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const Grade&, const Grade&) = default;
    friend std::strong_ordering operator<=>(const Grade& a, const Grade& b);

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

/// The finite truth-value set I. Always contains 0 and 1.
class GradeSet {
public:
    GradeSet();  // {0, 1}
    explicit GradeSet(std::vector<Grade> grades);

    static GradeSet crisp() { return GradeSet{}; }

    [[nodiscard]] std::span<const Grade> all() const { return grades_; }
    /// I⁺, ascending.
    [[nodiscard]] std::span<const Grade> positive() const { return std::span<const Grade>(grades_).subspan(1); }
    [[nodiscard]] bool contains(const Grade& g) const;
    [[nodiscard]] bool contains_positive(const Grade& g) const { return !g.is_zero() && contains(g); }
    /// Position of g inside positive(), if g ∈ I⁺.
    [[nodiscard]] std::optional<std::size_t> positive_index(const Grade& g) const;
    /// Least grade of I strictly above t; t must be in I⁺ \ {1}.
    [[nodiscard]] Grade successor(const Grade& t) const;
    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const GradeSet&, const GradeSet&) = default;

private:
    std::vector<Grade> grades_;
};

/// ℕ ∪ {∞}. Finite underflow is an error, never a wraparound.
class ExtNat {
public:
    constexpr ExtNat() = default;
    constexpr ExtNat(std::uint64_t value) : value_(value) {}  // NOLINT: implicit by design of count literals

    static constexpr ExtNat infinity() {
        ExtNat n;
        n.infinite_ = true;
        return n;
    }
    /// "inf" or a decimal natural.
    static ExtNat parse(std::string_view text);

    [[nodiscard]] constexpr bool is_infinite() const { return infinite_; }
    [[nodiscard]] constexpr bool is_zero() const { return !infinite_ && value_ == 0; }
    [[nodiscard]] std::uint64_t finite() const;
    [[nodiscard]] std::string to_string() const;

    ExtNat& operator+=(ExtNat rhs);
    ExtNat& operator-=(ExtNat rhs);
    friend ExtNat operator+(ExtNat a, ExtNat b) { return a += b; }
    friend ExtNat operator-(ExtNat a, ExtNat b) { return a -= b; }

    friend bool operator==(const ExtNat&, const ExtNat&) = default;
    friend std::strong_ordering operator<=>(const ExtNat& a, const ExtNat& b);

private:
    std::uint64_t value_ = 0;
    bool infinite_ = false;
};

struct ReactiveId {
    std::uint32_t value = 0;
    friend auto operator<=>(const ReactiveId&, const ReactiveId&) = default;
};

/// A map (reactive, grade ∈ I⁺) → ℕ∞ with finite support; absent entries are 0.
class FuzzyMultiset {
public:
    using Key = std::pair<ReactiveId, Grade>;

    [[nodiscard]] ExtNat count(ReactiveId v, const Grade& t) const;
    /// Grade 0 is rejected; a zero count removes the entry.
    void set(ReactiveId v, const Grade& t, ExtNat n);
    void add(ReactiveId v, const Grade& t, ExtNat n);
    void subtract(ReactiveId v, const Grade& t, ExtNat n);

    [[nodiscard]] const std::map<Key, ExtNat>& entries() const { return entries_; }
    [[nodiscard]] bool empty() const { return entries_.empty(); }

    friend bool operator==(const FuzzyMultiset&, const FuzzyMultiset&) = default;
    friend auto operator<=>(const FuzzyMultiset&, const FuzzyMultiset&) = default;

private:
    std::map<Key, ExtNat> entries_;
};

/// Σ_{t' ≥ t} F(v,t'). Throws PreconditionError unless t ∈ I⁺.
ExtNat level_sum(const FuzzyMultiset& f, ReactiveId v, const Grade& t, const GradeSet& grades);

/// A fuzzy subset of ℕ with finite support; absent naturals map to 0.
class FuzzySubsetOfNat {
public:
    FuzzySubsetOfNat() = default;
    FuzzySubsetOfNat(std::initializer_list<std::pair<const std::uint64_t, Grade>> init);

    [[nodiscard]] Grade at(std::uint64_t n) const;
    void assign(std::uint64_t n, const Grade& g);
    [[nodiscard]] const std::map<std::uint64_t, Grade>& support() const& { return values_; }
    [[nodiscard]] std::map<std::uint64_t, Grade> support() && { return std::move(values_); }

    friend bool operator==(const FuzzySubsetOfNat&, const FuzzySubsetOfNat&) = default;

private:
    std::map<std::uint64_t, Grade> values_;
};

/// Result of a t-level query; `universal` stands for all of ℕ (t = 0).
struct LevelSet {
    bool universal = false;
    std::set<std::uint64_t> members;

    friend bool operator==(const LevelSet&, const LevelSet&) = default;
};

LevelSet t_level(const FuzzySubsetOfNat& phi, const Grade& t);

/// Compares all t-levels for t ∈ I⁺. Throws PreconditionError if either
/// argument takes a value outside I.
bool levels_equal(const FuzzySubsetOfNat& phi, const FuzzySubsetOfNat& psi, const GradeSet& grades);

/// Pointwise maximum.
FuzzySubsetOfNat join(const FuzzySubsetOfNat& phi, const FuzzySubsetOfNat& psi);

/// Drops the value at 0.
FuzzySubsetOfNat restrict_positive(const FuzzySubsetOfNat& phi);

std::string to_string(const FuzzySubsetOfNat& phi);

} // namespace memfuzz
