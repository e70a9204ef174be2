/*!
  \file candidates.hpp
  \brief Candidate-location TSV: `read_id<TAB>read<TAB>position`

  The read field is either the read sequence or, with raw histograms
  enabled, four comma-separated base counts in A,T,G,C order. Lines starting
  with '#' and blank lines are ignored.
*/

#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "../dna.hpp"
#include "../genome_map.hpp"
#include "../oracle.hpp"
#include "text.hpp"

namespace pimfilter::io
{

struct candidate_options
{
  uint32_t read_length = 100u;
  bool raw_histograms = false;
};

namespace detail
{

inline std::vector<std::string_view> split_tabs( std::string_view line )
{
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for ( ;; )
  {
    auto const tab = line.find( '\t', start );
    fields.push_back( line.substr( start, tab == std::string_view::npos ? std::string_view::npos : tab - start ) );
    if ( tab == std::string_view::npos )
      return fields;
    start = tab + 1u;
  }
}

inline base_counts parse_raw_histogram( std::string_view field, std::size_t line_no )
{
  base_counts h;
  std::size_t start = 0;
  for ( std::size_t i = 0; i < 4u; ++i )
  {
    auto const comma = field.find( ',', start );
    if ( ( i < 3u ) == ( comma == std::string_view::npos ) )
      throw parse_error( "raw histogram must be four comma-separated counts", line_no );
    auto const part = field.substr( start, i < 3u ? comma - start : std::string_view::npos );
    if ( !parse_u32( part, h.counts[i] ) )
      throw parse_error( "bad base count '" + std::string( part ) + "'", line_no );
    start = comma + 1u;
  }
  return h;
}

} // namespace detail

inline std::vector<candidate> parse_candidates( std::istream& in, candidate_options const& opt = {} )
{
  std::vector<candidate> out;
  std::string raw;
  std::size_t line_no = 0;
  while ( std::getline( in, raw ) )
  {
    ++line_no;
    auto const line = trim_cr( raw );
    if ( line.empty() || line.front() == '#' )
      continue;
    auto const f = detail::split_tabs( line );
    if ( f.size() != 3u || f[0].empty() )
      throw parse_error( "expected read_id<TAB>read<TAB>position", line_no );

    candidate c;
    c.read_id = std::string( f[0] );
    if ( opt.raw_histograms )
    {
      try
      {
        c.hist = read_histogram( detail::parse_raw_histogram( f[1], line_no ), opt.read_length );
      }
      catch ( std::invalid_argument const& e )
      {
        throw parse_error( e.what(), line_no );
      }
    }
    else
    {
      if ( f[1].size() != opt.read_length )
        throw parse_error( "read has " + std::to_string( f[1].size() ) + " bases, expected " + std::to_string( opt.read_length ),
                           line_no );
      try
      {
        c.hist = read_histogram( oracle::histogram( f[1] ), opt.read_length );
      }
      catch ( invalid_base const& e )
      {
        throw parse_error( std::string( "invalid base '" ) + e.letter() + "' in read", line_no,
                           f[0].size() + 2u + e.position() );
      }
    }
    if ( !parse_u32( f[2], c.position ) )
      throw parse_error( "position '" + std::string( f[2] ) + "' is not a 32-bit unsigned integer", line_no );
    out.push_back( std::move( c ) );
  }
  return out;
}

inline void write_candidate( std::ostream& out, std::string_view id, std::string_view read, uint32_t position )
{
  out << id << '\t' << read << '\t' << position << '\n';
}

} // namespace pimfilter::io
