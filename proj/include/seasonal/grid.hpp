#ifndef SEASONAL_GRID_HPP
#define SEASONAL_GRID_HPP

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace seasonal
{

/// Dense row-major table indexed by (entity, hour).
template<typename T>
class Grid
{
  public:
    Grid() = default;
    Grid(std::size_t rows, std::size_t cols, const T& fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill)
    {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }

    T& operator()(std::size_t r, std::size_t c)
    {
        assert(r < rows_ && c < cols_);
        return data_[r * cols_ + c];
    }
    const T& operator()(std::size_t r, std::size_t c) const
    {
        assert(r < rows_ && c < cols_);
        return data_[r * cols_ + c];
    }

    std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    /// Copies columns [first, first + count) of every row.
    Grid columns(std::size_t first, std::size_t count) const
    {
        assert(first + count <= cols_);
        Grid out(rows_, count);
        for(std::size_t r = 0; r < rows_; ++r)
            for(std::size_t c = 0; c < count; ++c)
                out(r, c) = (*this)(r, first + c);
        return out;
    }

    /// Overwrites columns starting at `first` with the first `count` columns of `src`.
    void paste_columns(std::size_t first, const Grid& src, std::size_t count)
    {
        assert(src.rows_ == rows_ && first + count <= cols_ && count <= src.cols_);
        for(std::size_t r = 0; r < rows_; ++r)
            for(std::size_t c = 0; c < count; ++c)
                (*this)(r, first + c) = src(r, c);
    }

    const std::vector<T>& data() const noexcept { return data_; }

    friend bool operator==(const Grid&, const Grid&) = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

} // namespace seasonal
#endif // SEASONAL_GRID_HPP
