/*!
  \file perf_model.hpp
  \brief Analytic latency, bandwidth and power model of a full-genome filtering run
*/

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

namespace pimfilter
{

struct perf_params
{
  double cycle_time_ns = 10.0;
  double crossbars = 500'000.0;
  double cycles_per_iteration = 3'000.0;
  double locations = 46e9;
  /*! 5: worst-case tile receives five times the mean load; 1: perfectly balanced */
  double iter_factor = 5.0;
  double bytes_per_location = 13.0;
  double transfer_rate_gb_s = 10.0;

  static perf_params worst_case() { return {}; }
  static perf_params balanced()
  {
    perf_params p;
    p.iter_factor = 1.0;
    return p;
  }
};

struct cpu_baseline
{
  double total_s = 7'360.0;
  double transfer_fraction = 0.70;
  double compute_fraction = 0.30;

  double transfer_s() const { return total_s * transfer_fraction; }
  double compute_s() const { return total_s * compute_fraction; }
};

struct power_params
{
  /*! watts drawn by 1,000 arrays with 100 active rows each */
  double watts_per_thousand_arrays = 1.0;
  double budget_w = 100.0;
};

inline double compute_latency( perf_params const& p, double active_arrays )
{
  auto const iterations = p.iter_factor * p.locations / active_arrays;
  return iterations * p.cycles_per_iteration * p.cycle_time_ns * 1e-9;
}

inline double total_transferred_bytes( perf_params const& p ) { return p.bytes_per_location * p.locations; }

inline double transfer_latency( perf_params const& p ) { return total_transferred_bytes( p ) / ( p.transfer_rate_gb_s * 1e9 ); }

struct latency_breakdown
{
  double arrays{};
  double compute_s{};
  double transfer_s{};
  double total_s{};
  double bytes{};
  double speedup_compute{};
  double speedup_transfer{};
  double speedup_total{};
};

/*! \brief Compute plus transfer time; the iteration factor scales compute only. */
inline latency_breakdown total_latency( perf_params const& p, double active_arrays, cpu_baseline const& cpu = {} )
{
  latency_breakdown b;
  b.arrays = active_arrays;
  b.compute_s = compute_latency( p, active_arrays );
  b.transfer_s = transfer_latency( p );
  b.total_s = b.compute_s + b.transfer_s;
  b.bytes = total_transferred_bytes( p );
  b.speedup_compute = cpu.compute_s() / b.compute_s;
  b.speedup_transfer = b.transfer_s > 0.0 ? cpu.transfer_s() / b.transfer_s : 0.0;
  b.speedup_total = cpu.total_s / b.total_s;
  return b;
}

inline double power_constrained_arrays( power_params const& pw, double requested_arrays )
{
  return std::min( requested_arrays, std::floor( pw.budget_w / pw.watts_per_thousand_arrays * 1'000.0 ) );
}

struct curve_point
{
  double arrays{};
  double pim_s{};
  double cpu_s{};
};

inline std::vector<curve_point> latency_curve( perf_params const& p, std::span<double const> array_counts,
                                               cpu_baseline const& cpu = {} )
{
  std::vector<curve_point> out;
  out.reserve( array_counts.size() );
  for ( auto n : array_counts )
    out.push_back( { n, total_latency( p, n, cpu ).total_s, cpu.total_s } );
  return out;
}

/*! \brief Roughly log-spaced array counts from 1 to `max_arrays` (1, 2, 5, 10, 20, 50, ...). */
inline std::vector<double> default_array_counts( double max_arrays = 500'000.0 )
{
  std::vector<double> counts;
  for ( double decade = 1.0; decade <= max_arrays; decade *= 10.0 )
    for ( double m : { 1.0, 2.0, 5.0 } )
      if ( m * decade <= max_arrays )
        counts.push_back( m * decade );
  if ( counts.empty() || counts.back() != max_arrays )
    counts.push_back( max_arrays );
  return counts;
}

/*! \brief Smallest whole number of arrays whose total latency is below the CPU's; 0 if none is. */
inline uint64_t crossover_arrays( perf_params const& p, cpu_baseline const& cpu = {} )
{
  auto const budget = cpu.total_s - transfer_latency( p );
  if ( budget <= 0.0 )
    return 0u;
  auto const work = compute_latency( p, 1.0 );
  auto n = static_cast<uint64_t>( std::max( 1.0, std::floor( work / budget ) ) );
  while ( n > 1u && total_latency( p, static_cast<double>( n - 1u ), cpu ).total_s < cpu.total_s )
    --n;
  while ( total_latency( p, static_cast<double>( n ), cpu ).total_s >= cpu.total_s )
    ++n;
  return n;
}

} // namespace pimfilter
