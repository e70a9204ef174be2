/*!
  \file oracle.hpp
  \brief Software reference of the base-count filter and a Levenshtein distance
*/

#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <string_view>
#include <vector>

#include "dna.hpp"

namespace pimfilter::oracle
{

inline base_counts histogram( std::string_view seq )
{
  base_counts h;
  for ( std::size_t i = 0; i < seq.size(); ++i )
    ++h[to_base( seq[i], i )];
  return h;
}

/*! \brief Sum over bases of |frag_B - read_B|. */
inline uint32_t base_count_error( base_counts const& read, base_counts const& frag )
{
  uint32_t err = 0;
  for ( std::size_t i = 0; i < 4; ++i )
    err += read.counts[i] > frag.counts[i] ? read.counts[i] - frag.counts[i] : frag.counts[i] - read.counts[i];
  return err;
}

/*! \brief A location is discarded only when the count error strictly exceeds twice the edit threshold. */
inline bool should_discard( uint32_t error, uint32_t eth )
{
  return uint64_t{ error } > 2u * uint64_t{ eth };
}

inline bool should_discard( std::string_view read, std::string_view window, uint32_t eth )
{
  return should_discard( base_count_error( histogram( read ), histogram( window ) ), eth );
}

/*! \brief Minimum number of substitutions, insertions and deletions turning a into b. */
inline uint32_t edit_distance( std::string_view a, std::string_view b )
{
  std::vector<uint32_t> row( b.size() + 1u );
  for ( std::size_t j = 0; j <= b.size(); ++j )
    row[j] = static_cast<uint32_t>( j );
  for ( std::size_t i = 1; i <= a.size(); ++i )
  {
    uint32_t diag = row[0];
    row[0] = static_cast<uint32_t>( i );
    for ( std::size_t j = 1; j <= b.size(); ++j )
    {
      auto const up = row[j];
      row[j] = std::min( { up + 1u, row[j - 1u] + 1u, diag + ( a[i - 1u] == b[j - 1u] ? 0u : 1u ) } );
      diag = up;
    }
  }
  return row[b.size()];
}

} // namespace pimfilter::oracle
