/*!
  \file kernel.hpp
  \brief The in-array base-count filter for one potential location

  A tile stores `fragments` consecutive read-sized fragments of the
  reference, fragment f in the two columns (2f, 2f+1) and base i of the
  fragment in row i. Below the genome rows sit eight lane rows: one lane per
  base type (A, T, G, C, in code order) and one staging row per lane.

  The generated program runs thirteen steps:

  | step | work                                                        |
  |------|-------------------------------------------------------------|
  | 1    | host writes the read's four base counts into the lanes      |
  | 2    | the window is copied inverted into column pair P            |
  | 3    | four match bitmaps, one per base, from P                    |
  | 4    | popcount of each bitmap                                     |
  | 5    | each count is moved down into its lane                      |
  | 6    | S - R per lane and its two's complement                     |
  | 7    | |S - R| by a MUX on the sign bit                            |
  | 8-11 | the four absolute differences are summed pairwise           |
  | 12   | 2*eth - sum                                                 |
  | 13   | the sign bit of step 12 is read out: '1' means discard      |
*/

#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dna.hpp"
#include "magic/compound.hpp"
#include "magic/crossbar.hpp"
#include "magic/execute.hpp"
#include "magic/micro_op.hpp"
#include "magic/popcount.hpp"

namespace pimfilter
{

class layout_error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct kernel_geometry
{
  uint32_t read_length = 100u;
  uint32_t fragments = 65u;
  uint32_t rows = magic::crossbar::default_rows;
  uint32_t cols = magic::crossbar::default_cols;

  uint32_t span() const { return read_length * fragments; }
  /*! \brief Distance between consecutive tile starts; neighbours share one fragment. */
  uint32_t stride() const { return read_length * ( fragments - 1u ); }
  /*! \brief Largest valid window offset inside one tile. */
  uint32_t max_offset() const { return span() - read_length; }
};

/*! \brief Base counts of a read as written into the array: each count fits the lane width and they sum to at most the read length. */
class read_histogram
{
public:
  read_histogram() = default;

  explicit read_histogram( base_counts const& counts, uint32_t max_length = 100u ) : counts_( counts )
  {
    if ( counts.total() > max_length )
      throw std::invalid_argument( "read histogram sums to " + std::to_string( counts.total() ) + ", more than " +
                                   std::to_string( max_length ) + " bases" );
  }

  base_counts const& counts() const { return counts_; }
  uint32_t operator[]( base b ) const { return counts_[b]; }

private:
  base_counts counts_;
};

/*! \brief Gate expression comparing one stored base against base type `b`,
 * evaluated on the inverted bits (a, b) held in column pair P. */
struct match_function
{
  base type;
  bool negate_a; /* true: NOR(a) is an input instead of a */
  bool negate_b;

  /*! \brief Value of the expression for a stored base. */
  bool evaluate( base stored ) const
  {
    auto const code = static_cast<uint8_t>( stored );
    bool const a = !( code & 2u ), b = !( code & 1u ); /* P holds the inverted code */
    bool const in_a = negate_a ? !a : a;
    bool const in_b = negate_b ? !b : b;
    return !( in_a || in_b );
  }

  std::string to_string() const
  {
    return std::string( "NOR(" ) + ( negate_a ? "NOR(a)" : "a" ) + ", " + ( negate_b ? "NOR(b)" : "b" ) + ")";
  }
};

inline match_function match_function_for( base b )
{
  switch ( b )
  {
  case base::A: return { b, true, true };
  case base::T: return { b, true, false };
  case base::G: return { b, false, true };
  case base::C: return { b, false, false };
  }
  return { b, false, false };
}

/*! \brief Column and row assignment of the kernel inside a crossbar. */
struct kernel_layout
{
  kernel_geometry geometry;
  uint32_t genome_cols{};
  uint32_t inv_hi{}, inv_lo{};         /* P */
  uint32_t not_inv_hi{}, not_inv_lo{}; /* NOR(a), NOR(b) */
  std::array<uint32_t, 4> match{};     /* per base code */
  std::vector<uint32_t> count;         /* popcount result, shared with the lanes */
  std::vector<uint32_t> popcount_scratch;
  uint32_t lane_row{};
  std::vector<uint32_t> threshold; /* 2*eth, in the first lane row */
  uint32_t zero{};                 /* constant '0' in every lane row */
  std::vector<uint32_t> lane_free;
  std::size_t count_width{};
  std::size_t lane_width{};

  uint32_t lane( base b ) const { return lane_row + static_cast<uint8_t>( b ); }
  uint32_t staging( base b ) const { return lane_row + 4u + static_cast<uint8_t>( b ); }
};

namespace detail
{

/* lowest-index-first allocator over a fixed set of lane columns */
class lane_allocator
{
public:
  explicit lane_allocator( std::span<uint32_t const> cols ) : cols_( cols.begin(), cols.end() ), used_( cols.size(), false ) {}

  std::vector<uint32_t> take( std::size_t n )
  {
    std::vector<uint32_t> out;
    for ( std::size_t i = 0; i < cols_.size() && out.size() < n; ++i )
      if ( !used_[i] )
      {
        used_[i] = true;
        out.push_back( cols_[i] );
      }
    if ( out.size() < n )
      throw layout_error( "kernel layout overflow: lane region needs more than " + std::to_string( cols_.size() ) +
                          " columns" );
    return out;
  }

  void release( std::span<uint32_t const> cols )
  {
    for ( auto c : cols )
      for ( std::size_t i = 0; i < cols_.size(); ++i )
        if ( cols_[i] == c )
          used_[i] = false;
  }

private:
  std::vector<uint32_t> cols_;
  std::vector<bool> used_;
};

inline std::vector<uint32_t> take_range( uint32_t& next, std::size_t n, uint32_t limit )
{
  if ( next + n > limit )
    throw layout_error( "kernel layout overflow: needs column " + std::to_string( next + n - 1u ) + " of " +
                        std::to_string( limit ) );
  std::vector<uint32_t> out;
  for ( std::size_t i = 0; i < n; ++i )
    out.push_back( next++ );
  return out;
}

} // namespace detail

struct kernel_program
{
  magic::micro_program program;
  magic::cell result; /* sign bit of step 12 */
};

inline kernel_program build_kernel( kernel_layout const& layout, uint32_t offset, read_histogram const& hist );

/*! \brief Places the kernel for a geometry and checks that every region fits. */
inline kernel_layout make_kernel_layout( kernel_geometry const& g = {} )
{
  if ( g.read_length == 0u || g.fragments < 2u )
    throw layout_error( "read length must be positive and a tile needs at least two fragments" );
  kernel_layout l;
  l.geometry = g;
  l.genome_cols = 2u * g.fragments;
  l.count_width = static_cast<std::size_t>( std::bit_width( g.read_length ) );
  l.lane_width = l.count_width + 1u;
  l.lane_row = g.read_length;
  if ( l.lane_row + 8u > g.rows )
    throw layout_error( "kernel layout overflow: needs " + std::to_string( l.lane_row + 8u ) + " rows, crossbar has " +
                        std::to_string( g.rows ) );

  uint32_t next = l.genome_cols;
  auto const pair = detail::take_range( next, 4u, g.cols );
  l.inv_hi = pair[0];
  l.inv_lo = pair[1];
  l.not_inv_hi = pair[2];
  l.not_inv_lo = pair[3];
  auto const m = detail::take_range( next, 4u, g.cols );
  std::copy( m.begin(), m.end(), l.match.begin() );
  l.count = detail::take_range( next, l.count_width, g.cols );
  l.popcount_scratch = detail::take_range( next, magic::popcount_scratch_columns( g.read_length ), g.cols );

  /* lane rows are disjoint from the rows above, so their columns only avoid the shared count columns */
  std::vector<uint32_t> lane_cols;
  for ( uint32_t c = l.genome_cols; c < g.cols; ++c )
    if ( std::find( l.count.begin(), l.count.end(), c ) == l.count.end() )
      lane_cols.push_back( c );
  if ( lane_cols.size() < l.lane_width + 1u )
    throw layout_error( "kernel layout overflow: no room for lane constants" );
  l.threshold.assign( lane_cols.end() - static_cast<std::ptrdiff_t>( l.lane_width ), lane_cols.end() );
  lane_cols.resize( lane_cols.size() - l.lane_width );
  l.zero = lane_cols.back();
  lane_cols.pop_back();
  l.lane_free = std::move( lane_cols );

  ( void )build_kernel( l, 0u, read_histogram( {}, g.read_length ) );
  return l;
}

/*! \brief Per-step compute budgets; steps 8 to 11 share one budget. */
struct step_budget
{
  int first_step;
  int last_step;
  uint64_t compute;
};

inline constexpr std::array<step_budget, 10> kernel_step_budgets = { {
    { 1, 1, 8 },
    { 2, 2, 4 },
    { 3, 3, 6 },
    { 4, 4, 1656 },
    { 5, 5, 8 },
    { 6, 6, 111 },
    { 7, 7, 28 },
    { 8, 11, 153 },
    { 12, 12, 73 },
    { 13, 13, 1 },
} };

inline constexpr uint64_t kernel_compute_budget = 2050u;
inline constexpr uint64_t kernel_total_budget = 3000u;

/*! \brief Builds the thirteen-step program for the window starting at tile offset `offset`.
 *
 * The window may straddle two fragment columns; it is then copied as two
 * row ranges and appears in P cyclically rotated, which leaves its counts
 * unchanged.
 */
inline kernel_program build_kernel( kernel_layout const& layout, uint32_t offset, read_histogram const& hist )
{
  using namespace magic;
  auto const& g = layout.geometry;
  if ( offset > g.max_offset() )
    throw std::out_of_range( "window offset " + std::to_string( offset ) + " outside tile (max " +
                             std::to_string( g.max_offset() ) + ")" );
  auto const len = g.read_length;
  auto const cw = layout.count_width;
  auto const n = layout.lane_width;
  auto const genome_rows = index_set::range( 0u, len );
  auto const lanes = index_set::range( layout.lane_row, layout.lane_row + 4u );
  auto const lane_a = layout.lane( base::A ), lane_t = layout.lane( base::T ), lane_g = layout.lane( base::G ),
             lane_c = layout.lane( base::C );

  kernel_program kp;
  auto& prog = kp.program;
  pimfilter::detail::lane_allocator alloc( layout.lane_free );

  /* step 1 */
  auto const read_count = alloc.take( n );
  {
    write_external_op w;
    for ( auto b : all_bases )
      for ( std::size_t j = 0; j < n; ++j )
      {
        w.cells.push_back( { layout.lane( b ), read_count[j] } );
        w.bits.push_back( ( hist[b] >> j ) & 1u );
      }
    w.cycle_cost = 2u * all_bases.size();
    micro_program s;
    s.push( std::move( w ) );
    prog.append_step( 1, s );
  }

  /* step 2 */
  {
    micro_program s;
    auto const frag = offset / len, row0 = offset % len;
    s.init( { cell_region{ genome_rows, index_set{ layout.inv_hi, layout.inv_lo } } } );
    auto const head = index_set::range( row0, len );
    s.nor_row( { 2u * frag }, layout.inv_hi, head );
    s.nor_row( { 2u * frag + 1u }, layout.inv_lo, head );
    if ( row0 > 0u )
    {
      auto const tail = index_set::range( 0u, row0 );
      s.nor_row( { 2u * frag + 2u }, layout.inv_hi, tail );
      s.nor_row( { 2u * frag + 3u }, layout.inv_lo, tail );
    }
    prog.append_step( 2, s );
  }

  /* step 3 */
  {
    micro_program s;
    index_set cols{ layout.not_inv_hi, layout.not_inv_lo };
    for ( auto c : layout.match )
      cols.insert( c );
    s.init( { cell_region{ genome_rows, cols } } );
    s.nor_row( { layout.inv_hi }, layout.not_inv_hi, genome_rows );
    s.nor_row( { layout.inv_lo }, layout.not_inv_lo, genome_rows );
    for ( auto b : all_bases )
    {
      auto const f = match_function_for( b );
      s.nor_row( { f.negate_a ? layout.not_inv_hi : layout.inv_hi, f.negate_b ? layout.not_inv_lo : layout.inv_lo },
                 layout.match[static_cast<uint8_t>( b )], genome_rows );
    }
    prog.append_step( 3, s );
  }

  /* steps 4 and 5, interleaved: each count leaves row 0 before the next popcount reuses its columns */
  {
    auto const count_cols = index_set::of( layout.count );
    for ( auto b : all_bases )
    {
      column_pool pool( layout.popcount_scratch );
      prog.append_step( 4, build_popcount( layout.match[static_cast<uint8_t>( b )], 0u, len, layout.count, pool ).program );

      micro_program s;
      if ( b == base::A )
        s.init( { cell_region{ index_set::range( layout.lane_row, layout.lane_row + 8u ), count_cols } } );
      s.nor_col( { 0u }, layout.staging( b ), count_cols );
      s.nor_col( { layout.staging( b ) }, layout.lane( b ), count_cols );
      prog.append_step( 5, s );
    }
  }

  /* step 6 */
  auto const diff = alloc.take( n + 1u );
  std::vector<uint32_t> negated;
  {
    std::vector<uint32_t> counts( layout.count.begin(), layout.count.end() );
    counts.push_back( layout.zero );
    auto const scratch = alloc.take( 8u * n );
    column_pool pool( scratch );
    prog.append_step( 6, build_subtractor( lanes, counts, read_count, diff, pool ).program );
    alloc.release( scratch );
    alloc.release( read_count );

    auto const high = alloc.take( n - 1u );
    auto const neg_scratch = alloc.take( 4u * ( n - 1u ) );
    column_pool npool( neg_scratch );
    auto neg = build_negate( lanes, std::span( diff ).first( n ), high, npool );
    negated = neg.result_cols;
    prog.append_step( 6, neg.program );
    alloc.release( neg_scratch );
  }

  /* step 7 */
  auto const abs_diff = alloc.take( cw );
  {
    auto const scratch = alloc.take( 3u * cw );
    column_pool pool( scratch );
    prog.append_step( 7, build_mux( lanes, std::span( diff ).first( cw ), std::span( negated ).first( cw ), diff[n],
                                    abs_diff, pool )
                             .program );
    alloc.release( scratch );
    alloc.release( diff );
    alloc.release( std::span( negated ).subspan( 1u ) );
  }

  /* steps 8 and 9: (A + T) in lane A, (G + C) in lane G */
  auto const pair_sum = alloc.take( n );
  {
    auto const stage = alloc.take( cw );
    auto const stage_cols = index_set::of( stage );
    micro_program s;
    s.init( { cell_region{ lanes, stage_cols } } );
    for ( std::size_t j = 0; j < cw; ++j )
      s.nor_row( { abs_diff[j] }, stage[j], index_set{ lane_t, lane_c } );
    s.nor_col( { lane_t }, lane_a, stage_cols );
    s.nor_col( { lane_c }, lane_g, stage_cols );
    prog.append_step( 8, s );

    auto const scratch = alloc.take( 8u * cw - 1u );
    column_pool pool( scratch );
    prog.append_step( 9, build_adder( index_set{ lane_a, lane_g }, abs_diff, stage, pair_sum, pool,
                                      adder_options{ layout.zero, true } )
                             .program );
    alloc.release( scratch );
    alloc.release( stage );
    alloc.release( abs_diff );
  }

  /* steps 10 and 11: total in lane A; it never exceeds twice the read length, so no carry-out */
  auto const total = alloc.take( n );
  {
    auto const stage = alloc.take( n );
    auto const stage_cols = index_set::of( stage );
    micro_program s;
    s.init( { cell_region{ index_set{ lane_a, lane_g }, stage_cols } } );
    for ( std::size_t j = 0; j < n; ++j )
      s.nor_row( { pair_sum[j] }, stage[j], index_set{ lane_g } );
    s.nor_col( { lane_g }, lane_a, stage_cols );
    prog.append_step( 10, s );

    auto const scratch = alloc.take( 8u * n - 1u );
    column_pool pool( scratch );
    prog.append_step( 11, build_adder( index_set{ lane_a }, pair_sum, stage, total, pool, adder_options{ layout.zero, false } )
                              .program );
    alloc.release( scratch );
    alloc.release( stage );
    alloc.release( pair_sum );
  }

  /* step 12 */
  auto const margin = alloc.take( n + 1u );
  {
    column_pool pool( alloc.take( 8u * n - 1u ) );
    prog.append_step( 12, build_subtractor( index_set{ lane_a }, layout.threshold, total, margin, pool,
                                            adder_options{ layout.zero, true } )
                              .program );
  }

  /* step 13 */
  kp.result = { lane_a, margin[n] };
  micro_program s;
  s.read( kp.result );
  prog.append_step( 13, s );
  return kp;
}

/*! \brief Host-side load of a tile: genome bases (zero padded past `slice`) and the lane constant '0'. */
inline void load_tile( magic::crossbar& xb, kernel_layout const& layout, std::string_view slice )
{
  auto const& g = layout.geometry;
  if ( xb.rows() != g.rows || xb.cols() != g.cols )
    throw layout_error( "crossbar dimensions do not match the kernel geometry" );
  if ( slice.size() > g.span() )
    throw std::invalid_argument( "tile slice of " + std::to_string( slice.size() ) + " bases exceeds span " +
                                 std::to_string( g.span() ) );
  for ( uint32_t i = 0; i < g.span(); ++i )
  {
    auto const code = i < slice.size() ? encode_base( slice[i] ) : std::array<bool, 2>{ false, false };
    auto const row = i % g.read_length, col = 2u * ( i / g.read_length );
    xb.load( row, col, code[0] );
    xb.load( row, col + 1u, code[1] );
  }
  for ( uint32_t r = layout.lane_row; r < layout.lane_row + 4u; ++r )
    xb.load( r, layout.zero, false );
}

/*! \brief Host-side write of the constant 2*eth into the first lane row. */
inline void load_threshold( magic::crossbar& xb, kernel_layout const& layout, uint32_t eth )
{
  auto const twice = uint64_t{ 2 } * eth;
  if ( eth > layout.geometry.read_length || twice >> layout.lane_width )
    throw std::invalid_argument( "edit threshold " + std::to_string( eth ) + " exceeds the read length" );
  for ( std::size_t j = 0; j < layout.lane_width; ++j )
    xb.load( layout.lane_row, layout.threshold[j], ( twice >> j ) & 1u );
}

struct kernel_result
{
  uint32_t location{};
  bool discard{};
  uint64_t compute_cycles{};
  uint64_t init_cycles{};
  /*! indexed by step, entry 0 unused */
  std::array<magic::step_cycles, 14> per_step{};

  uint64_t total_cycles() const { return compute_cycles + init_cycles; }

  uint64_t step_compute( int first, int last ) const
  {
    uint64_t n = 0;
    for ( int s = first; s <= last; ++s )
      n += per_step[static_cast<std::size_t>( s )].compute;
    return n;
  }
};

/*! \brief Executes the kernel on a crossbar already holding its tile.
 *
 * Writes 2*eth, forgets scratch definedness from earlier runs so strict mode
 * re-checks initialization, and runs the program.
 */
inline kernel_result run_kernel( magic::crossbar& xb, kernel_layout const& layout, read_histogram const& hist,
                                 uint32_t offset, uint32_t eth, magic::execution_options const& options = {} )
{
  load_threshold( xb, layout, eth );
  xb.forget_scratch();
  auto const kp = build_kernel( layout, offset, hist );
  auto const out = magic::execute( kp.program, xb, options );

  kernel_result r;
  r.location = offset;
  r.discard = out.read_bits.back();
  r.compute_cycles = out.cycles.compute;
  r.init_cycles = out.cycles.init;
  for ( auto const& [step, c] : out.cycles.per_step )
    if ( step >= 1 && step <= 13 )
      r.per_step[static_cast<std::size_t>( step )] = c;
  return r;
}

/*! \brief One crossbar dedicated to a genome slice. */
class filter_tile
{
public:
  explicit filter_tile( kernel_layout layout ) : layout_( std::move( layout ) ), xb_( layout_.geometry.rows, layout_.geometry.cols ) {}

  void load( std::string_view slice ) { load_tile( xb_, layout_, slice ); }

  kernel_result run( read_histogram const& hist, uint32_t offset, uint32_t eth,
                     magic::execution_options const& options = {} )
  {
    return run_kernel( xb_, layout_, hist, offset, eth, options );
  }

  magic::crossbar const& array() const { return xb_; }
  kernel_layout const& layout() const { return layout_; }

private:
  kernel_layout layout_;
  magic::crossbar xb_;
};

} // namespace pimfilter
