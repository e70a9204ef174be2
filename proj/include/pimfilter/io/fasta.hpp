/*!
  \file fasta.hpp
  \brief Reference genome in FASTA format
*/

#pragma once

#include <istream>
#include <ostream>
#include <string>

#include "../dna.hpp"
#include "../genome_map.hpp"
#include "text.hpp"

namespace pimfilter::io
{

/*! \brief Reads all records, upper-cased and concatenated; record boundaries are kept.
 *
 * Sequence lines may use either case. Any other letter is an error reported
 * with its line and column. Blank lines are skipped.
 */
inline reference_genome parse_fasta( std::istream& in )
{
  reference_genome g;
  std::string raw;
  std::size_t line_no = 0;
  while ( std::getline( in, raw ) )
  {
    ++line_no;
    auto const line = trim_cr( raw );
    if ( line.empty() )
      continue;
    if ( line.front() == '>' )
    {
      if ( !g.records.empty() )
        g.records.back().length = g.sequence.size() - g.records.back().start;
      g.records.push_back( { std::string( line.substr( 1 ) ), g.sequence.size(), 0u } );
      continue;
    }
    if ( g.records.empty() )
      throw parse_error( "sequence data before the first '>' header", line_no, 1 );
    for ( std::size_t i = 0; i < line.size(); ++i )
    {
      try
      {
        g.sequence.push_back( to_char( to_base( line[i] ) ) );
      }
      catch ( invalid_base const& )
      {
        throw parse_error( std::string( "invalid base '" ) + line[i] + "'", line_no, i + 1u );
      }
    }
  }
  if ( g.records.empty() )
    throw parse_error( "empty FASTA input", line_no == 0 ? 1 : line_no );
  g.records.back().length = g.sequence.size() - g.records.back().start;
  return g;
}

inline void write_fasta( std::ostream& out, std::string const& name, std::string_view seq, std::size_t width = 80 )
{
  out << '>' << name << '\n';
  for ( std::size_t i = 0; i < seq.size(); i += width )
    out << seq.substr( i, width ) << '\n';
}

} // namespace pimfilter::io
