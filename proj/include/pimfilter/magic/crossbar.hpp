/*!
  \file crossbar.hpp
  \brief Cell storage of a single memristive crossbar array

  Cells are stored column-major as packed 64-bit words so that row-parallel
  gates reduce to a handful of word operations per column.
*/

#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace pimfilter::magic
{

struct cell
{
  uint32_t row{};
  uint32_t col{};

  friend bool operator==( cell const&, cell const& ) = default;
};

/*! \brief Dynamic set of row or column indices backed by a bitset.
 *
 * The universe grows on demand; bounds are checked against the crossbar
 * only when an op referencing the set is validated.
 */
class index_set
{
public:
  index_set() = default;

  index_set( std::initializer_list<uint32_t> indices )
  {
    for ( auto i : indices )
      insert( i );
  }

  template<class Range>
  static index_set of( Range const& indices )
  {
    index_set s;
    for ( auto i : indices )
      s.insert( static_cast<uint32_t>( i ) );
    return s;
  }

  /*! \brief Half-open range [first, last). */
  static index_set range( uint32_t first, uint32_t last )
  {
    index_set s;
    if ( last <= first )
      return s;
    s.words_.assign( ( last + 63u ) / 64u, 0u );
    for ( uint32_t w = first / 64u; w * 64u < last; ++w )
    {
      uint64_t mask = ~uint64_t{ 0 };
      if ( w * 64u < first )
        mask &= ~uint64_t{ 0 } << ( first - w * 64u );
      if ( ( w + 1u ) * 64u > last )
        mask &= ~uint64_t{ 0 } >> ( ( w + 1u ) * 64u - last );
      s.words_[w] |= mask;
    }
    return s;
  }

  void insert( uint32_t i )
  {
    if ( i / 64u >= words_.size() )
      words_.resize( i / 64u + 1u, 0u );
    words_[i / 64u] |= uint64_t{ 1 } << ( i % 64u );
  }

  void erase( uint32_t i )
  {
    if ( i / 64u < words_.size() )
      words_[i / 64u] &= ~( uint64_t{ 1 } << ( i % 64u ) );
  }

  bool contains( uint32_t i ) const
  {
    return i / 64u < words_.size() && ( ( words_[i / 64u] >> ( i % 64u ) ) & 1u );
  }

  bool empty() const
  {
    return std::all_of( words_.begin(), words_.end(), []( auto w ) { return w == 0u; } );
  }

  std::size_t size() const
  {
    std::size_t n = 0;
    for ( auto w : words_ )
      n += static_cast<std::size_t>( std::popcount( w ) );
    return n;
  }

  /*! \brief One past the largest member, 0 when empty. */
  uint32_t bound() const
  {
    for ( auto w = words_.size(); w-- > 0; )
      if ( words_[w] != 0u )
        return static_cast<uint32_t>( w * 64u + 64u - std::countl_zero( words_[w] ) );
    return 0u;
  }

  uint64_t word( std::size_t w ) const { return w < words_.size() ? words_[w] : 0u; }

  template<class Fn>
  void for_each( Fn&& fn ) const
  {
    for ( std::size_t w = 0; w < words_.size(); ++w )
    {
      auto bits = words_[w];
      while ( bits )
      {
        auto b = std::countr_zero( bits );
        fn( static_cast<uint32_t>( w * 64u + b ) );
        bits &= bits - 1u;
      }
    }
  }

  std::vector<uint32_t> to_vector() const
  {
    std::vector<uint32_t> v;
    for_each( [&]( auto i ) { v.push_back( i ); } );
    return v;
  }

  index_set& operator|=( index_set const& other )
  {
    if ( other.words_.size() > words_.size() )
      words_.resize( other.words_.size(), 0u );
    for ( std::size_t w = 0; w < other.words_.size(); ++w )
      words_[w] |= other.words_[w];
    return *this;
  }

  friend bool operator==( index_set const& a, index_set const& b )
  {
    auto n = std::max( a.words_.size(), b.words_.size() );
    for ( std::size_t w = 0; w < n; ++w )
      if ( a.word( w ) != b.word( w ) )
        return false;
    return true;
  }

  /*! \brief Compact text form, e.g. `0-3,7`. */
  std::string to_string() const
  {
    std::string out;
    auto v = to_vector();
    for ( std::size_t i = 0; i < v.size(); )
    {
      auto j = i;
      while ( j + 1 < v.size() && v[j + 1] == v[j] + 1 )
        ++j;
      if ( !out.empty() )
        out += ',';
      out += std::to_string( v[i] );
      if ( j > i )
        out += '-' + std::to_string( v[j] );
      i = j + 1;
    }
    return out.empty() ? "{}" : out;
  }

private:
  std::vector<uint64_t> words_;
};

/*! \brief Rectangular block of cells: every row in `rows` crossed with every column in `cols`. */
struct cell_region
{
  index_set rows;
  index_set cols;
};

/*! \brief State of one crossbar: a rows x cols grid of binary cells plus cycle counters.
 *
 * Besides the logical values the array keeps two bookkeeping masks used by
 * strict validation: `defined` marks cells whose value was produced by the
 * host or by an executed op, and `persistent` marks host-loaded cells that
 * survive `forget_scratch()`.
 */
class crossbar
{
public:
  static constexpr uint32_t default_rows = 128u;
  static constexpr uint32_t default_cols = 256u;

  explicit crossbar( uint32_t rows = default_rows, uint32_t cols = default_cols )
      : rows_( rows ), cols_( cols ), words_per_col_( ( rows + 63u ) / 64u ),
        bits_( std::size_t{ cols } * words_per_col_, 0u ),
        defined_( bits_.size(), 0u ),
        persistent_( bits_.size(), 0u )
  {
    if ( rows == 0u || cols == 0u )
      throw std::invalid_argument( "crossbar dimensions must be positive" );
  }

  uint32_t rows() const { return rows_; }
  uint32_t cols() const { return cols_; }
  uint32_t words_per_col() const { return words_per_col_; }

  uint64_t compute_cycles() const { return compute_cycles_; }
  uint64_t init_cycles() const { return init_cycles_; }

  bool in_bounds( cell c ) const { return c.row < rows_ && c.col < cols_; }

  bool get( cell c ) const { return get( c.row, c.col ); }
  bool get( uint32_t row, uint32_t col ) const
  {
    check( row, col );
    return ( bits_[index( col, row / 64u )] >> ( row % 64u ) ) & 1u;
  }

  bool is_defined( uint32_t row, uint32_t col ) const
  {
    check( row, col );
    return ( defined_[index( col, row / 64u )] >> ( row % 64u ) ) & 1u;
  }

  /*! \brief Host-side write outside of any program; the cell becomes persistent and costs no cycles. */
  void load( uint32_t row, uint32_t col, bool value )
  {
    check( row, col );
    auto const i = index( col, row / 64u );
    auto const m = uint64_t{ 1 } << ( row % 64u );
    bits_[i] = value ? ( bits_[i] | m ) : ( bits_[i] & ~m );
    defined_[i] |= m;
    persistent_[i] |= m;
  }

  /*! \brief Drops the defined mark of every non-persistent cell. */
  void forget_scratch() { defined_ = persistent_; }

  void reset_cycles()
  {
    compute_cycles_ = 0u;
    init_cycles_ = 0u;
  }

  /* raw word access used by the executor */
  uint64_t& word( uint32_t col, uint32_t w ) { return bits_[index( col, w )]; }
  uint64_t word( uint32_t col, uint32_t w ) const { return bits_[index( col, w )]; }
  uint64_t& defined_word( uint32_t col, uint32_t w ) { return defined_[index( col, w )]; }
  uint64_t defined_word( uint32_t col, uint32_t w ) const { return defined_[index( col, w )]; }

  /*! \brief Mask of valid rows within word `w`. */
  uint64_t row_mask( uint32_t w ) const
  {
    if ( ( w + 1u ) * 64u <= rows_ )
      return ~uint64_t{ 0 };
    auto valid = rows_ - w * 64u;
    return valid >= 64u ? ~uint64_t{ 0 } : ( ( uint64_t{ 1 } << valid ) - 1u );
  }

  void add_compute_cycles( uint64_t n ) { compute_cycles_ += n; }
  void add_init_cycles( uint64_t n ) { init_cycles_ += n; }

  friend bool operator==( crossbar const& a, crossbar const& b )
  {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.bits_ == b.bits_ &&
           a.compute_cycles_ == b.compute_cycles_ && a.init_cycles_ == b.init_cycles_;
  }

  /*! \brief Cells (row-major order) whose values differ between two equally sized arrays. */
  friend std::vector<cell> diff( crossbar const& a, crossbar const& b )
  {
    if ( a.rows_ != b.rows_ || a.cols_ != b.cols_ )
      throw std::invalid_argument( "cannot diff crossbars of different dimensions" );
    std::vector<cell> out;
    for ( uint32_t r = 0; r < a.rows_; ++r )
      for ( uint32_t c = 0; c < a.cols_; ++c )
        if ( a.get( r, c ) != b.get( r, c ) )
          out.push_back( { r, c } );
    return out;
  }

private:
  std::size_t index( uint32_t col, uint32_t w ) const { return std::size_t{ col } * words_per_col_ + w; }

  void check( uint32_t row, uint32_t col ) const
  {
    if ( row >= rows_ || col >= cols_ )
      throw std::out_of_range( "cell (" + std::to_string( row ) + "," + std::to_string( col ) + ") outside " +
                               std::to_string( rows_ ) + "x" + std::to_string( cols_ ) + " crossbar" );
  }

  uint32_t rows_;
  uint32_t cols_;
  uint32_t words_per_col_;
  std::vector<uint64_t> bits_;
  std::vector<uint64_t> defined_;
  std::vector<uint64_t> persistent_;
  uint64_t compute_cycles_{ 0 };
  uint64_t init_cycles_{ 0 };
};

} // namespace pimfilter::magic
