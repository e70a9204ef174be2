/*!
  \file compound.hpp
  \brief Builders for multi-gate MAGIC operations

  All builders are row-parallel: an operand is a list of columns (little
  endian, lsb first) and the whole operation runs simultaneously in every row
  of a row set. Each builder opens with a single init op covering the cells it
  will write, so its compute-cycle count is exactly the number of NOR gates.

  Compute-cycle costs:

  | operation            | cycles                          |
  |----------------------|---------------------------------|
  | NOT                  | 1 per bit                       |
  | COPY                 | 2 per bit                       |
  | half adder           | 5                               |
  | N-bit adder          | 9N + 1                          |
  | N-bit subtractor     | 9N + 1                          |
  | N-bit MUX            | 4N                              |
  | N-bit negation       | 5(N - 1)                        |

  Passing an external zero carry-in removes the `+ 1`; dropping the carry-out
  removes one more cycle.
*/

#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "micro_op.hpp"

namespace pimfilter::magic
{

class insufficient_scratch : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class placement_error : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/*! \brief Free columns a builder may use for intermediate values. */
class column_pool
{
public:
  column_pool() = default;
  explicit column_pool( std::vector<uint32_t> cols ) : cols_( std::move( cols ) ) {}

  static column_pool range( uint32_t first, uint32_t last )
  {
    std::vector<uint32_t> v;
    for ( auto c = first; c < last; ++c )
      v.push_back( c );
    return column_pool( std::move( v ) );
  }

  std::size_t available() const { return cols_.size() - next_; }

  std::vector<uint32_t> take( std::size_t n )
  {
    if ( n > available() )
      throw insufficient_scratch( "need " + std::to_string( n ) + " scratch columns, " + std::to_string( available() ) +
                                  " available" );
    std::vector<uint32_t> out( cols_.begin() + static_cast<std::ptrdiff_t>( next_ ),
                               cols_.begin() + static_cast<std::ptrdiff_t>( next_ + n ) );
    next_ += n;
    return out;
  }

  uint32_t take_one() { return take( 1 ).front(); }

  std::span<uint32_t const> remaining() const { return { cols_.data() + next_, available() }; }

private:
  std::vector<uint32_t> cols_;
  std::size_t next_ = 0;
};

enum class compound_kind
{
  not_gate,
  copy,
  half_adder,
  adder,
  subtractor,
  mux,
  negate,
  popcount
};

/*! \brief A built compound operation: its program, declared cost and where the result lives. */
struct compound_op
{
  compound_kind kind;
  std::size_t width{};
  micro_program program;
  uint64_t declared_compute_cycles{};
  index_set rows;
  std::vector<uint32_t> result_cols;
};

struct adder_options
{
  /*! a column already holding '0' in every active row, used instead of generating one */
  std::optional<uint32_t> zero_carry_in;
  /*! when false, the result has N bits and the final carry gate is skipped */
  bool carry_out = true;
};

inline uint64_t adder_cycles( std::size_t n, adder_options const& o = {} )
{
  return 9u * n + ( o.zero_carry_in ? 0u : 1u ) - ( o.carry_out ? 0u : 1u );
}

inline uint64_t mux_cycles( std::size_t n ) { return 4u * n; }
inline uint64_t copy_cycles( std::size_t n ) { return 2u * n; }
inline uint64_t negate_cycles( std::size_t n ) { return n == 0u ? 0u : 5u * ( n - 1u ); }
inline constexpr uint64_t half_adder_cycles = 5u;

namespace detail
{

inline void require_disjoint( std::vector<std::span<uint32_t const>> groups, char const* what )
{
  std::vector<uint32_t> all;
  for ( auto g : groups )
    all.insert( all.end(), g.begin(), g.end() );
  std::sort( all.begin(), all.end() );
  if ( std::adjacent_find( all.begin(), all.end() ) != all.end() )
    throw placement_error( std::string( what ) + ": operand, result and scratch columns must not alias" );
}

inline void require_width( std::size_t got, std::size_t want, char const* what )
{
  if ( got != want )
    throw placement_error( std::string( what ) + ": expected " + std::to_string( want ) + " columns, got " +
                           std::to_string( got ) );
}

inline void require_rows( index_set const& rows, char const* what )
{
  if ( rows.empty() )
    throw placement_error( std::string( what ) + ": row set is empty" );
}

inline void open( micro_program& p, index_set const& rows, std::vector<std::span<uint32_t const>> written )
{
  index_set cols;
  for ( auto g : written )
    for ( auto c : g )
      cols.insert( c );
  if ( !cols.empty() )
    p.init( { cell_region{ rows, cols } } );
}

/* Nine-NOR full adder / full subtractor slice. The first seven gates are shared:
 * t4 = XNOR(a, b) and t5 = (a XOR b) AND NOT c. Sum/difference is NOR(t6, t7).
 * Adder carry is NOR(t1, t5); subtractor borrow is NOR(t3, t7). */
inline void full_slice( micro_program& p, index_set const& rows, uint32_t a, uint32_t b, uint32_t c,
                        std::span<uint32_t const> t, uint32_t sum, std::optional<uint32_t> carry, bool subtract )
{
  p.nor_row( { a, b }, t[0], rows );
  p.nor_row( { a, t[0] }, t[1], rows );
  p.nor_row( { b, t[0] }, t[2], rows );
  p.nor_row( { t[1], t[2] }, t[3], rows );
  p.nor_row( { t[3], c }, t[4], rows );
  p.nor_row( { t[3], t[4] }, t[5], rows );
  p.nor_row( { c, t[4] }, t[6], rows );
  p.nor_row( { t[5], t[6] }, sum, rows );
  if ( carry )
  {
    if ( subtract )
      p.nor_row( { t[2], t[6] }, *carry, rows );
    else
      p.nor_row( { t[0], t[4] }, *carry, rows );
  }
}

inline compound_op ripple( compound_kind kind, index_set const& rows, std::span<uint32_t const> x,
                           std::span<uint32_t const> y, std::span<uint32_t const> result, column_pool& pool,
                           adder_options const& o )
{
  char const* name = kind == compound_kind::adder ? "adder" : "subtractor";
  require_rows( rows, name );
  auto const n = x.size();
  if ( n == 0u )
    throw placement_error( std::string( name ) + ": width must be positive" );
  require_width( y.size(), n, name );
  require_width( result.size(), o.carry_out ? n + 1u : n, name );

  auto const gates = pool.take( 7u * n );
  auto const inner = pool.take( n - 1u );
  std::vector<uint32_t> carry_in;
  if ( !o.zero_carry_in )
    carry_in = pool.take( 1u );

  std::vector<uint32_t> fixed_zero;
  if ( o.zero_carry_in )
    fixed_zero.push_back( *o.zero_carry_in );
  require_disjoint( { x, y, result, gates, inner, carry_in, fixed_zero }, name );

  compound_op op{ kind, n, {}, adder_cycles( n, o ), rows, { result.begin(), result.end() } };
  open( op.program, rows, { result, gates, inner, carry_in } );

  uint32_t c = 0;
  if ( o.zero_carry_in )
    c = *o.zero_carry_in;
  else
  {
    /* the first gate cell still holds its initial '1', so its NOT is a zero carry-in */
    c = carry_in.front();
    op.program.nor_row( { gates[0] }, c, rows );
  }

  for ( std::size_t i = 0; i < n; ++i )
  {
    std::optional<uint32_t> carry;
    if ( i + 1u < n )
      carry = inner[i];
    else if ( o.carry_out )
      carry = result[n];
    full_slice( op.program, rows, x[i], y[i], c, std::span( gates ).subspan( 7u * i, 7u ), result[i], carry,
                kind == compound_kind::subtractor );
    if ( carry )
      c = *carry;
  }
  return op;
}

} // namespace detail

/*! \brief dst <- NOT src, one gate per bit column. */
inline compound_op build_not( index_set const& rows, std::span<uint32_t const> src, std::span<uint32_t const> dst )
{
  detail::require_rows( rows, "not" );
  detail::require_width( dst.size(), src.size(), "not" );
  detail::require_disjoint( { src, dst }, "not" );
  compound_op op{ compound_kind::not_gate, src.size(), {}, src.size(), rows, { dst.begin(), dst.end() } };
  detail::open( op.program, rows, { dst } );
  for ( std::size_t i = 0; i < src.size(); ++i )
    op.program.nor_row( { src[i] }, dst[i], rows );
  return op;
}

/*! \brief dst <- src as NOT(NOT(src)) through one scratch column per bit. */
inline compound_op build_copy( index_set const& rows, std::span<uint32_t const> src, std::span<uint32_t const> dst,
                               column_pool& pool )
{
  detail::require_rows( rows, "copy" );
  detail::require_width( dst.size(), src.size(), "copy" );
  auto const tmp = pool.take( src.size() );
  detail::require_disjoint( { src, dst, tmp }, "copy" );
  compound_op op{ compound_kind::copy, src.size(), {}, copy_cycles( src.size() ), rows, { dst.begin(), dst.end() } };
  detail::open( op.program, rows, { tmp, dst } );
  for ( std::size_t i = 0; i < src.size(); ++i )
    op.program.nor_row( { src[i] }, tmp[i], rows );
  for ( std::size_t i = 0; i < src.size(); ++i )
    op.program.nor_row( { tmp[i] }, dst[i], rows );
  return op;
}

/*! \brief (sum, carry) <- a + b; result_cols = {sum, carry}. */
inline compound_op build_half_adder( index_set const& rows, uint32_t a, uint32_t b, uint32_t sum, uint32_t carry,
                                     column_pool& pool )
{
  detail::require_rows( rows, "half adder" );
  auto const t = pool.take( 3u );
  std::vector<uint32_t> in{ a, b }, out{ sum, carry };
  detail::require_disjoint( { in, out, t }, "half adder" );
  compound_op op{ compound_kind::half_adder, 1u, {}, half_adder_cycles, rows, out };
  detail::open( op.program, rows, { out, t } );
  op.program.nor_row( { a }, t[0], rows );
  op.program.nor_row( { b }, t[1], rows );
  op.program.nor_row( { t[0], t[1] }, carry, rows );
  op.program.nor_row( { a, b }, t[2], rows );
  op.program.nor_row( { carry, t[2] }, sum, rows );
  return op;
}

/*! \brief result <- x + y. `result` has N+1 columns (N without carry-out). */
inline compound_op build_adder( index_set const& rows, std::span<uint32_t const> x, std::span<uint32_t const> y,
                                std::span<uint32_t const> result, column_pool& pool, adder_options const& o = {} )
{
  return detail::ripple( compound_kind::adder, rows, x, y, result, pool, o );
}

/*! \brief result <- x - y as an (N+1)-bit two's-complement value; the msb is the final borrow. */
inline compound_op build_subtractor( index_set const& rows, std::span<uint32_t const> x, std::span<uint32_t const> y,
                                     std::span<uint32_t const> result, column_pool& pool, adder_options const& o = {} )
{
  return detail::ripple( compound_kind::subtractor, rows, x, y, result, pool, o );
}

/*! \brief result <- (sel == 0 ? x : y), per bit ((y_i + sel')' + (x_i + sel)')'.
 *
 * sel' is formed separately in every bit slice, giving four gates per bit.
 */
inline compound_op build_mux( index_set const& rows, std::span<uint32_t const> x, std::span<uint32_t const> y,
                              uint32_t sel, std::span<uint32_t const> result, column_pool& pool )
{
  detail::require_rows( rows, "mux" );
  auto const n = x.size();
  detail::require_width( y.size(), n, "mux" );
  detail::require_width( result.size(), n, "mux" );
  auto const t = pool.take( 3u * n );
  std::vector<uint32_t> s{ sel };
  /* x and y may share a column (e.g. the lsb of a value and of its negation) */
  detail::require_disjoint( { x, s, result, t }, "mux" );
  detail::require_disjoint( { y, s, result, t }, "mux" );
  compound_op op{ compound_kind::mux, n, {}, mux_cycles( n ), rows, { result.begin(), result.end() } };
  detail::open( op.program, rows, { result, t } );
  for ( std::size_t i = 0; i < n; ++i )
  {
    auto const nsel = t[3u * i], a = t[3u * i + 1u], b = t[3u * i + 2u];
    op.program.nor_row( { sel }, nsel, rows );
    op.program.nor_row( { y[i], nsel }, a, rows );
    op.program.nor_row( { x[i], sel }, b, rows );
    op.program.nor_row( { a, b }, result[i], rows );
  }
  return op;
}

/*! \brief Two's-complement negation of an N-bit value.
 *
 * Bit i of -v is v_i XOR (v_0 OR ... OR v_{i-1}); bit 0 equals v_0, so the
 * result reuses src[0] and only bits 1..N-1 are written to `dst_high`.
 * The prefix OR is a single multi-input NOR per bit.
 */
inline compound_op build_negate( index_set const& rows, std::span<uint32_t const> src,
                                 std::span<uint32_t const> dst_high, column_pool& pool )
{
  detail::require_rows( rows, "negate" );
  auto const n = src.size();
  if ( n == 0u )
    throw placement_error( "negate: width must be positive" );
  detail::require_width( dst_high.size(), n - 1u, "negate" );
  auto const t = pool.take( 4u * ( n - 1u ) );
  detail::require_disjoint( { src, dst_high, t }, "negate" );

  compound_op op{ compound_kind::negate, n, {}, negate_cycles( n ), rows, { src[0] } };
  op.result_cols.insert( op.result_cols.end(), dst_high.begin(), dst_high.end() );
  detail::open( op.program, rows, { dst_high, t } );
  for ( std::size_t i = 1; i < n; ++i )
  {
    auto const none_below = t[4u * ( i - 1u )], t1 = t[4u * ( i - 1u ) + 1u], t2 = t[4u * ( i - 1u ) + 2u],
               t3 = t[4u * ( i - 1u ) + 3u];
    op.program.nor_row( std::vector<uint32_t>( src.begin(), src.begin() + static_cast<std::ptrdiff_t>( i ) ), none_below, rows );
    /* XNOR(v_i, none_below) == v_i XOR any_below */
    op.program.nor_row( { src[i], none_below }, t1, rows );
    op.program.nor_row( { src[i], t1 }, t2, rows );
    op.program.nor_row( { none_below, t1 }, t3, rows );
    op.program.nor_row( { t2, t3 }, dst_high[i - 1u], rows );
  }
  return op;
}

} // namespace pimfilter::magic
