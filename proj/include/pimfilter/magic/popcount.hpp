/*!
  \file popcount.hpp
  \brief Column popcount by recursive pairing of vertically adjacent values

  Level by level, every second value is shifted up onto its partner's row and
  the pairs are summed by one row-parallel adder:

  1. the source rows' values are inverted into stage columns (one NOR per bit,
     all source rows at once),
  2. each source row is NOR-ed into its destination row across the stage
     columns (one column-parallel NOR per pair), which restores the value,
  3. one adder runs over all destination rows.

  An unpaired value keeps its row; its stage operand is forced to zero with a
  single column-parallel NOR, so it is widened by the same adder. Value widths
  grow only when the largest possible partial sum needs another bit, which
  leaves the final count `bit_width(height)` bits wide in the first row.
*/

#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <vector>

#include "compound.hpp"

namespace pimfilter::magic
{

namespace detail
{

struct popcount_level
{
  std::vector<uint32_t> dst;
  std::vector<uint32_t> src;
  std::vector<uint32_t> carried; /* zero or one unpaired row */
  std::size_t width_in{};
  std::size_t width_out{};
};

inline std::vector<popcount_level> plan_popcount( uint32_t first_row, std::size_t height )
{
  std::vector<popcount_level> levels;
  std::vector<uint32_t> rows( height );
  std::vector<std::size_t> cover( height, 1u );
  for ( std::size_t i = 0; i < height; ++i )
    rows[i] = first_row + static_cast<uint32_t>( i );

  std::size_t width = 1u;
  while ( rows.size() > 1u )
  {
    popcount_level lvl;
    lvl.width_in = width;
    std::vector<uint32_t> next_rows;
    std::vector<std::size_t> next_cover;
    for ( std::size_t i = 0; i + 1u < rows.size(); i += 2u )
    {
      lvl.dst.push_back( rows[i] );
      lvl.src.push_back( rows[i + 1u] );
      next_rows.push_back( rows[i] );
      next_cover.push_back( cover[i] + cover[i + 1u] );
    }
    if ( rows.size() % 2u == 1u )
    {
      lvl.carried.push_back( rows.back() );
      next_rows.push_back( rows.back() );
      next_cover.push_back( cover.back() );
    }
    auto const max_cover = *std::max_element( next_cover.begin(), next_cover.end() );
    width = std::max<std::size_t>( width, std::bit_width( max_cover ) );
    lvl.width_out = width;
    levels.push_back( std::move( lvl ) );
    rows = std::move( next_rows );
    cover = std::move( next_cover );
  }
  return levels;
}

} // namespace detail

/*! \brief Compute cycles of `build_popcount` for a column of `height` bits. */
inline uint64_t popcount_cycles( std::size_t height )
{
  if ( height == 1u )
    return copy_cycles( 1u );
  uint64_t total = 0;
  for ( auto const& l : detail::plan_popcount( 0u, height ) )
  {
    total += l.width_in + l.src.size() + l.carried.size();
    if ( l.width_in == 1u && l.width_out == 2u )
      total += half_adder_cycles;
    else
      total += adder_cycles( l.width_in, { std::nullopt, l.width_out > l.width_in } );
  }
  return total;
}

/*! \brief Scratch columns `build_popcount` needs for a column of `height` bits. */
inline std::size_t popcount_scratch_columns( std::size_t height )
{
  auto const w = static_cast<std::size_t>( std::bit_width( height ) );
  return height == 1u ? 1u : 3u * w + 8u * w;
}

/*! \brief Counts the '1' cells of `column` in rows [first_row, first_row + height).
 *
 * The count is written little endian into `result` (exactly
 * `bit_width(height)` columns) in row `first_row`.
 */
inline compound_op build_popcount( uint32_t column, uint32_t first_row, std::size_t height,
                                   std::span<uint32_t const> result, column_pool& pool )
{
  if ( height == 0u )
    throw placement_error( "popcount: height must be positive" );
  auto const width = static_cast<std::size_t>( std::bit_width( height ) );
  detail::require_width( result.size(), width, "popcount" );

  compound_op op{ compound_kind::popcount, height, {}, popcount_cycles( height ), index_set{ first_row },
                  { result.begin(), result.end() } };

  if ( height == 1u )
  {
    std::vector<uint32_t> src{ column };
    auto copy = build_copy( index_set{ first_row }, src, result, pool );
    op.program.append( copy.program );
    return op;
  }

  auto const stage = pool.take( width );
  std::vector<uint32_t> buffers[2] = { pool.take( width ), pool.take( width ) };
  std::vector<uint32_t> const adder_scratch( pool.remaining().begin(), pool.remaining().end() );
  if ( adder_scratch.size() < 8u * width )
    throw insufficient_scratch( "popcount: need " + std::to_string( 8u * width ) + " adder scratch columns, " +
                                std::to_string( adder_scratch.size() ) + " available" );
  pool.take( 8u * width );

  std::vector<uint32_t> in_col{ column };
  detail::require_disjoint( { in_col, result, stage, buffers[0], buffers[1], adder_scratch }, "popcount" );

  auto const levels = detail::plan_popcount( first_row, height );
  std::vector<uint32_t> cur = in_col;
  for ( std::size_t li = 0; li < levels.size(); ++li )
  {
    auto const& l = levels[li];
    auto const w = l.width_in;
    std::span<uint32_t const> stage_w( stage.data(), w );
    index_set stage_cols = index_set::of( stage_w );

    index_set level_rows = index_set::of( l.dst );
    level_rows |= index_set::of( l.src );
    level_rows |= index_set::of( l.carried );
    op.program.init( { cell_region{ level_rows, stage_cols } } );

    auto const src_rows = index_set::of( l.src );
    for ( std::size_t j = 0; j < w; ++j )
      op.program.nor_row( { cur[j] }, stage[j], src_rows );
    for ( auto r : l.carried )
      op.program.nor_col( { l.dst.front() }, r, stage_cols );
    for ( std::size_t p = 0; p < l.src.size(); ++p )
      op.program.nor_col( { l.src[p] }, l.dst[p], stage_cols );

    bool const last = li + 1u == levels.size();
    std::vector<uint32_t> next = last ? std::vector<uint32_t>( result.begin(), result.end() )
                                      : std::vector<uint32_t>( buffers[li % 2u].begin(), buffers[li % 2u].begin() +
                                                                                              static_cast<std::ptrdiff_t>( l.width_out ) );
    index_set add_rows = index_set::of( l.dst );
    add_rows |= index_set::of( l.carried );
    column_pool level_pool( adder_scratch );
    if ( w == 1u && l.width_out == 2u )
      op.program.append( build_half_adder( add_rows, cur[0], stage[0], next[0], next[1], level_pool ).program );
    else
      op.program.append( build_adder( add_rows, std::span( cur ).first( w ), stage_w, next, level_pool,
                                      { std::nullopt, l.width_out > w } )
                             .program );
    cur = std::move( next );
  }
  return op;
}

} // namespace pimfilter::magic
