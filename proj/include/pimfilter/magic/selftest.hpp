/*!
  \file selftest.hpp
  \brief Row-parallel evaluation of compound operations and the gate self-test

  `evaluate_rows` places one input combination per crossbar row, so a single
  execution of a row-parallel builder checks up to 128 cases.
*/

#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "compound.hpp"
#include "crossbar.hpp"
#include "execute.hpp"
#include "popcount.hpp"

namespace pimfilter::magic
{

/*! \brief Builds an op over `rows` with operand columns, result columns and a scratch pool. */
using row_builder = std::function<compound_op( index_set const& rows, std::vector<std::vector<uint32_t>> const& operands,
                                               std::vector<uint32_t> const& result, column_pool& pool )>;

struct row_evaluation
{
  std::vector<uint64_t> results;
  uint64_t compute_cycles{}; /* of one execution */
  uint64_t declared_cycles{};
};

/*! \brief Runs `build` once per batch of up to `rows` cases and returns the result value of every case.
 *
 * Operands are laid out from column 0 in order, then the result, then scratch.
 */
inline row_evaluation evaluate_rows( std::span<std::size_t const> widths, std::size_t result_width,
                                     std::span<std::vector<uint64_t> const> cases, row_builder const& build,
                                     uint32_t rows = crossbar::default_rows, uint32_t cols = crossbar::default_cols )
{
  std::vector<std::vector<uint32_t>> operands;
  uint32_t next = 0;
  for ( auto w : widths )
  {
    operands.emplace_back();
    for ( std::size_t i = 0; i < w; ++i )
      operands.back().push_back( next++ );
  }
  std::vector<uint32_t> result;
  for ( std::size_t i = 0; i < result_width; ++i )
    result.push_back( next++ );

  row_evaluation ev;
  for ( std::size_t first = 0; first < cases.size(); first += rows )
  {
    auto const batch = std::min<std::size_t>( rows, cases.size() - first );
    crossbar xb( rows, cols );
    for ( std::size_t r = 0; r < batch; ++r )
      for ( std::size_t k = 0; k < widths.size(); ++k )
        for ( std::size_t i = 0; i < widths[k]; ++i )
          xb.load( static_cast<uint32_t>( r ), operands[k][i], ( cases[first + r][k] >> i ) & 1u );
    auto pool = column_pool::range( next, cols );
    auto const op = build( index_set::range( 0u, static_cast<uint32_t>( batch ) ), operands, result, pool );
    auto const out = execute( op.program, xb );
    ev.compute_cycles = out.cycles.compute;
    ev.declared_cycles = op.declared_compute_cycles;
    for ( std::size_t r = 0; r < batch; ++r )
    {
      uint64_t v = 0;
      for ( std::size_t i = 0; i < op.result_cols.size(); ++i )
        v |= uint64_t{ xb.get( static_cast<uint32_t>( r ), op.result_cols[i] ) } << i;
      ev.results.push_back( v );
    }
  }
  return ev;
}

struct gate_check
{
  std::string name;
  uint64_t expected_cycles{};
  uint64_t measured_cycles{};
  /*! false: expected_cycles is an upper bound */
  bool exact{ true };
  std::size_t cases{};
  std::size_t failures{};

  bool cost_ok() const { return exact ? measured_cycles == expected_cycles : measured_cycles <= expected_cycles; }
  bool passed() const { return failures == 0u && cost_ok(); }
};

namespace detail
{

inline std::vector<std::vector<uint64_t>> all_cases( std::span<std::size_t const> widths )
{
  std::size_t bits = 0;
  for ( auto w : widths )
    bits += w;
  std::vector<std::vector<uint64_t>> out;
  for ( uint64_t v = 0; v < ( uint64_t{ 1 } << bits ); ++v )
  {
    std::vector<uint64_t> c;
    auto rest = v;
    for ( auto w : widths )
    {
      c.push_back( rest & ( ( uint64_t{ 1 } << w ) - 1u ) );
      rest >>= w;
    }
    out.push_back( std::move( c ) );
  }
  return out;
}

inline std::vector<std::vector<uint64_t>> random_cases( std::span<std::size_t const> widths, std::size_t n, std::mt19937_64& rng )
{
  std::vector<std::vector<uint64_t>> out( n );
  for ( auto& c : out )
    for ( auto w : widths )
      c.push_back( rng() & ( ( uint64_t{ 1 } << w ) - 1u ) );
  return out;
}

inline gate_check check( std::string name, std::vector<std::size_t> widths, std::size_t result_width,
                         std::vector<std::vector<uint64_t>> const& cases, row_builder const& build,
                         std::function<uint64_t( std::vector<uint64_t> const& )> const& reference, uint64_t expected_cycles )
{
  auto const ev = evaluate_rows( widths, result_width, cases, build );
  gate_check g{ std::move( name ), expected_cycles, ev.compute_cycles, true, cases.size(), 0u };
  for ( std::size_t i = 0; i < cases.size(); ++i )
    if ( ev.results[i] != reference( cases[i] ) )
      ++g.failures;
  return g;
}

} // namespace detail

/*! \brief Truth-table and cycle-cost check of every primitive and compound operation. */
inline std::vector<gate_check> run_gate_checks( uint64_t seed = 1u, std::size_t random_trials = 1000u )
{
  std::mt19937_64 rng( seed );
  std::vector<gate_check> out;

  for ( std::size_t k = 1; k <= 3; ++k )
  {
    std::vector<std::size_t> widths( k, 1u );
    out.push_back( detail::check(
        "NOR" + std::to_string( k ), widths, 1u, detail::all_cases( widths ),
        []( index_set const& rows, auto const& ops, auto const& res, column_pool& ) {
          compound_op op{ compound_kind::not_gate, 1u, {}, 1u, rows, res };
          std::vector<uint32_t> in;
          for ( auto const& o : ops )
            in.push_back( o[0] );
          op.program.init( { cell_region{ rows, index_set::of( res ) } } );
          op.program.nor_row( in, res[0], rows );
          return op;
        },
        []( auto const& c ) {
          uint64_t any = 0;
          for ( auto v : c )
            any |= v;
          return any ? 0u : 1u;
        },
        1u ) );
  }

  std::vector<std::size_t> const one{ 4u };
  out.push_back( detail::check(
      "NOT4", one, 4u, detail::all_cases( one ),
      []( index_set const& rows, auto const& ops, auto const& res, column_pool& ) { return build_not( rows, ops[0], res ); },
      []( auto const& c ) { return ~c[0] & 0xFu; }, 4u ) );
  out.push_back( detail::check(
      "COPY4", one, 4u, detail::all_cases( one ),
      []( index_set const& rows, auto const& ops, auto const& res, column_pool& pool ) {
        return build_copy( rows, ops[0], res, pool );
      },
      []( auto const& c ) { return c[0]; }, copy_cycles( 4u ) ) );

  std::vector<std::size_t> const bits2{ 1u, 1u };
  out.push_back( detail::check(
      "HALF_ADDER", bits2, 2u, detail::all_cases( bits2 ),
      []( index_set const& rows, auto const& ops, auto const& res, column_pool& pool ) {
        return build_half_adder( rows, ops[0][0], ops[1][0], res[0], res[1], pool );
      },
      []( auto const& c ) { return c[0] + c[1]; }, half_adder_cycles ) );

  for ( std::size_t n : { 4u, 8u } )
  {
    std::vector<std::size_t> const w{ n, n };
    auto const cases = n == 4u ? detail::all_cases( w ) : detail::random_cases( w, random_trials, rng );
    auto const mask = ( uint64_t{ 1 } << ( n + 1u ) ) - 1u;
    out.push_back( detail::check(
        "ADDER" + std::to_string( n ), w, n + 1u, cases,
        []( index_set const& rows, auto const& ops, auto const& res, column_pool& pool ) {
          return build_adder( rows, ops[0], ops[1], res, pool );
        },
        []( auto const& c ) { return c[0] + c[1]; }, adder_cycles( n ) ) );
    out.push_back( detail::check(
        "SUBTRACTOR" + std::to_string( n ), w, n + 1u, cases,
        []( index_set const& rows, auto const& ops, auto const& res, column_pool& pool ) {
          return build_subtractor( rows, ops[0], ops[1], res, pool );
        },
        [mask]( auto const& c ) { return ( c[0] - c[1] ) & mask; }, adder_cycles( n ) ) );

    std::vector<std::size_t> const mw{ n, n, 1u };
    auto const mcases = n == 4u ? detail::all_cases( mw ) : detail::random_cases( mw, random_trials, rng );
    out.push_back( detail::check(
        "MUX" + std::to_string( n ), mw, n, mcases,
        []( index_set const& rows, auto const& ops, auto const& res, column_pool& pool ) {
          return build_mux( rows, ops[0], ops[1], ops[2][0], res, pool );
        },
        []( auto const& c ) { return c[2] ? c[1] : c[0]; }, mux_cycles( n ) ) );

    std::vector<std::size_t> const nw{ n };
    auto const nmask = ( uint64_t{ 1 } << n ) - 1u;
    out.push_back( detail::check(
        "NEGATE" + std::to_string( n ), nw, n - 1u, detail::all_cases( nw ),
        []( index_set const& rows, auto const& ops, auto const& res, column_pool& pool ) {
          return build_negate( rows, ops[0], res, pool );
        },
        [nmask]( auto const& c ) { return ( uint64_t{ 0 } - c[0] ) & nmask; }, negate_cycles( n ) ) );
  }

  /* popcount runs down one column, so every trial is its own crossbar */
  gate_check pc{ "POPCOUNT100", 414u, 0u, false, random_trials, 0u };
  std::vector<uint32_t> const result{ 1u, 2u, 3u, 4u, 5u, 6u, 7u };
  for ( std::size_t t = 0; t < random_trials; ++t )
  {
    crossbar xb;
    uint32_t expected = 0;
    auto const density = rng() % 101u;
    for ( uint32_t r = 0; r < 100u; ++r )
    {
      bool const bit = rng() % 100u < density;
      expected += bit;
      xb.load( r, 0u, bit );
    }
    auto pool = column_pool::range( 8u, 8u + static_cast<uint32_t>( popcount_scratch_columns( 100u ) ) );
    auto const op = build_popcount( 0u, 0u, 100u, result, pool );
    auto const cycles = execute( op.program, xb ).cycles.compute;
    pc.measured_cycles = std::max( pc.measured_cycles, cycles );
    uint32_t got = 0;
    for ( std::size_t i = 0; i < result.size(); ++i )
      got |= uint32_t{ xb.get( 0u, result[i] ) } << i;
    if ( got != expected )
      ++pc.failures;
  }
  out.push_back( pc );
  return out;
}

} // namespace pimfilter::magic
