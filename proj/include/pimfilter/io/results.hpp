/*!
  \file results.hpp
  \brief Decision TSV with a trailing summary block

  \verbatim
  read_id	position	decision
  r1	6400	discard
  ...
  # total	<n>
  # discard_rate	<discarded / processed>
  ...
  \endverbatim
*/

#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "../genome_map.hpp"
#include "text.hpp"

namespace pimfilter::io
{

inline constexpr char const* results_header = "read_id\tposition\tdecision";

inline void emit_summary( std::ostream& out, filter_stats const& st )
{
  out << "# total\t" << st.total << '\n'
      << "# processed\t" << st.processed << '\n'
      << "# kept\t" << st.kept << '\n'
      << "# discarded\t" << st.discarded << '\n'
      << "# passthrough\t" << st.passthrough << '\n'
      << "# discard_rate\t" << format_fixed( st.discard_rate(), 6 ) << '\n'
      << "# passthrough_fraction\t" << format_fixed( st.passthrough_fraction(), 6 ) << '\n'
      << "# tiles\t" << st.tiles << '\n'
      << "# iter_cap\t" << st.schedule.iter_cap << '\n'
      << "# active_limit\t" << st.schedule.active_limit << '\n'
      << "# rounds\t" << st.schedule.rounds << '\n'
      << "# waves\t" << st.schedule.waves << '\n'
      << "# compute_cycles\t" << st.compute_cycles << '\n'
      << "# init_cycles\t" << st.init_cycles << '\n'
      << "# mean_cycles_per_location\t" << format_fixed( st.mean_cycles(), 3 ) << '\n'
      << "# bytes_transferred\t" << st.bytes_transferred << '\n';
}

inline void emit_results( std::ostream& out, std::span<candidate const> candidates, filter_run const& run )
{
  out << results_header << '\n';
  for ( auto const& d : run.decisions )
  {
    auto const& c = candidates[d.candidate];
    out << c.read_id << '\t' << c.position << '\t' << to_string( d.outcome ) << '\n';
  }
  emit_summary( out, run.stats );
  if ( !out )
    throw std::runtime_error( "failed to write results" );
}

struct result_line
{
  std::string read_id;
  uint32_t position{};
  verdict outcome{};
};

/*! \brief Decision lines of a results file; the summary block is skipped. */
inline std::vector<result_line> parse_results( std::istream& in )
{
  std::vector<result_line> out;
  std::string raw;
  std::size_t line_no = 0;
  while ( std::getline( in, raw ) )
  {
    ++line_no;
    std::string_view line = trim_cr( raw );
    if ( line.empty() || line.front() == '#' || line == results_header )
      continue;
    auto const t1 = line.find( '\t' ), t2 = line.find( '\t', t1 == std::string_view::npos ? t1 : t1 + 1u );
    if ( t1 == std::string_view::npos || t2 == std::string_view::npos )
      throw parse_error( "expected read_id<TAB>position<TAB>decision", line_no );
    result_line r;
    r.read_id = std::string( line.substr( 0, t1 ) );
    if ( !parse_u32( line.substr( t1 + 1u, t2 - t1 - 1u ), r.position ) )
      throw parse_error( "bad position", line_no );
    auto const v = line.substr( t2 + 1u );
    if ( v == "keep" )
      r.outcome = verdict::keep;
    else if ( v == "discard" )
      r.outcome = verdict::discard;
    else if ( v == "passthrough" )
      r.outcome = verdict::passthrough;
    else
      throw parse_error( "unknown decision '" + std::string( v ) + "'", line_no );
    out.push_back( std::move( r ) );
  }
  return out;
}

} // namespace pimfilter::io
