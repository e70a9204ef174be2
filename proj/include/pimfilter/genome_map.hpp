/*!
  \file genome_map.hpp
  \brief Tiling of a reference genome over crossbars, routing and scheduling of candidate locations
*/

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "kernel.hpp"
#include "magic/execute.hpp"

namespace pimfilter
{

struct fasta_record
{
  std::string name;
  std::size_t start{};
  std::size_t length{};
};

struct reference_genome
{
  std::string sequence;
  std::vector<fasta_record> records;

  std::size_t size() const { return sequence.size(); }
};

/*! \brief A crossbar's slice of the genome. `length` is below the span only for the last tile. */
struct tile
{
  uint32_t index{};
  std::size_t start{};
  std::size_t length{};
};

inline std::size_t tile_count( std::size_t genome_length, kernel_geometry const& g = {} )
{
  if ( genome_length < g.read_length )
    throw std::invalid_argument( "genome of " + std::to_string( genome_length ) + " bases is shorter than one read (" +
                                 std::to_string( g.read_length ) + ")" );
  auto const windows = genome_length - g.read_length;
  return std::max<std::size_t>( 1u, ( windows + g.stride() - 1u ) / g.stride() );
}

inline std::vector<tile> partition( std::size_t genome_length, kernel_geometry const& g = {} )
{
  auto const n = tile_count( genome_length, g );
  std::vector<tile> tiles;
  tiles.reserve( n );
  for ( std::size_t i = 0; i < n; ++i )
  {
    auto const start = i * std::size_t{ g.stride() };
    tiles.push_back( { static_cast<uint32_t>( i ), start, std::min<std::size_t>( g.span(), genome_length - start ) } );
  }
  return tiles;
}

struct route_result
{
  uint32_t tile{};
  uint32_t offset{};

  friend bool operator==( route_result const&, route_result const& ) = default;
};

/*! \brief Tile hosting the window at absolute position p.
 *
 * Windows in the overlap of two tiles go to the lower-index tile start that
 * is not above p. The last tile also takes the positions past its stride,
 * so its offsets may reach `max_offset()`.
 */
inline route_result route( std::size_t position, std::size_t genome_length, kernel_geometry const& g = {} )
{
  if ( position + g.read_length > genome_length )
    throw std::out_of_range( "location " + std::to_string( position ) + " + read length exceeds genome length " +
                             std::to_string( genome_length ) );
  auto const tiles = tile_count( genome_length, g );
  auto const t = std::min<std::size_t>( position / g.stride(), tiles - 1u );
  return { static_cast<uint32_t>( t ), static_cast<uint32_t>( position - t * g.stride() ) };
}

/*! \brief A potential location of a read. Reads are carried by their base counts only. */
struct candidate
{
  std::string read_id;
  read_histogram hist;
  uint32_t position{};
};

struct queued_location
{
  std::size_t candidate{}; /* index into the candidate list */
  uint32_t offset{};
};

struct location_queue
{
  uint32_t tile{};
  std::vector<queued_location> entries;
};

/*! \brief One queue per tile (empty ones included), in candidate order. */
inline std::vector<location_queue> build_queues( std::span<candidate const> candidates, std::size_t genome_length,
                                                 kernel_geometry const& g = {} )
{
  std::vector<location_queue> queues( tile_count( genome_length, g ) );
  for ( std::size_t i = 0; i < queues.size(); ++i )
    queues[i].tile = static_cast<uint32_t>( i );
  for ( std::size_t i = 0; i < candidates.size(); ++i )
  {
    auto const r = route( candidates[i].position, genome_length, g );
    queues[r.tile].entries.push_back( { i, r.offset } );
  }
  return queues;
}

/*! \brief Per-tile cap on processed locations: `factor` times the mean queue length, rounded up. */
inline std::size_t iteration_cap( std::size_t total_locations, std::size_t tiles, double factor )
{
  if ( tiles == 0u )
    return 0u;
  return static_cast<std::size_t>( std::ceil( factor * static_cast<double>( total_locations ) / static_cast<double>( tiles ) - 1e-9 ) );
}

struct activation
{
  uint32_t tile{};
  std::size_t entry{}; /* position in the tile's queue */
};

struct schedule_report
{
  std::size_t rounds{};
  std::size_t waves{};
  std::size_t processed{};
  std::size_t overflow{};
  std::size_t iter_cap{};
  std::size_t active_limit{};
};

struct schedule_plan
{
  std::vector<std::vector<activation>> waves;
  schedule_report report;
};

/*! \brief Round j runs the j-th location of every tile that has one, split into waves of at most `active_limit` tiles.
 *
 * Entries past `iter_cap` in a queue are overflow. An `active_limit` of 0 means unlimited.
 */
inline schedule_plan schedule( std::span<std::size_t const> queue_lengths, std::size_t iter_cap, std::size_t active_limit = 0u )
{
  schedule_plan plan;
  auto& rep = plan.report;
  rep.iter_cap = iter_cap;
  rep.active_limit = active_limit == 0u ? queue_lengths.size() : active_limit;
  std::size_t longest = 0;
  for ( auto n : queue_lengths )
  {
    auto const run = std::min( n, iter_cap );
    rep.processed += run;
    rep.overflow += n - run;
    longest = std::max( longest, run );
  }
  rep.rounds = longest;
  for ( std::size_t j = 0; j < longest; ++j )
  {
    std::vector<activation> round;
    for ( std::size_t t = 0; t < queue_lengths.size(); ++t )
      if ( j < std::min( queue_lengths[t], iter_cap ) )
        round.push_back( { static_cast<uint32_t>( t ), j } );
    for ( std::size_t i = 0; i < round.size(); i += rep.active_limit )
      plan.waves.emplace_back( round.begin() + static_cast<std::ptrdiff_t>( i ),
                               round.begin() + static_cast<std::ptrdiff_t>( std::min( round.size(), i + rep.active_limit ) ) );
  }
  rep.waves = plan.waves.size();
  return plan;
}

enum class verdict
{
  keep,
  discard,
  passthrough
};

inline char const* to_string( verdict v )
{
  switch ( v )
  {
  case verdict::keep: return "keep";
  case verdict::discard: return "discard";
  case verdict::passthrough: return "passthrough";
  }
  return "?";
}

struct location_decision
{
  std::size_t candidate{};
  uint32_t tile{};
  verdict outcome{};
  uint64_t compute_cycles{};
  uint64_t init_cycles{};
};

struct filter_config
{
  uint32_t eth = 5u;
  kernel_geometry geometry{};
  double iter_factor = 5.0;
  std::size_t active_limit = 0u;
  magic::exec_mode mode = magic::exec_mode::strict;
  unsigned threads = 1u;
  /*! op trace of every kernel run; forces a single worker */
  std::ostream* trace = nullptr;
};

/*! \brief Bytes moved between host and crossbars per processed location: 8 in (rounded from 60 bits), 5 out. */
inline constexpr uint64_t bytes_per_location = 13u;

struct filter_stats
{
  std::size_t total{};
  std::size_t processed{};
  std::size_t kept{};
  std::size_t discarded{};
  std::size_t passthrough{};
  uint64_t compute_cycles{};
  uint64_t init_cycles{};
  uint64_t bytes_transferred{};
  std::size_t tiles{};
  schedule_report schedule;

  /*! discarded / processed; pass-through locations are not counted */
  double discard_rate() const { return processed == 0u ? 0.0 : static_cast<double>( discarded ) / static_cast<double>( processed ); }
  double passthrough_fraction() const { return total == 0u ? 0.0 : static_cast<double>( passthrough ) / static_cast<double>( total ); }
  double mean_cycles() const
  {
    return processed == 0u ? 0.0 : static_cast<double>( compute_cycles + init_cycles ) / static_cast<double>( processed );
  }
};

struct filter_run
{
  /*! ordered by tile index, then queue order */
  std::vector<location_decision> decisions;
  filter_stats stats;
};

namespace detail
{

inline std::vector<location_decision> run_queue( std::string_view genome, std::span<candidate const> candidates,
                                                 location_queue const& q, tile const& t, kernel_layout const& layout,
                                                 std::size_t iter_cap, filter_config const& cfg )
{
  std::vector<location_decision> out;
  out.reserve( q.entries.size() );
  if ( q.entries.empty() )
    return out;
  filter_tile xb( layout );
  xb.load( genome.substr( t.start, t.length ) );
  magic::execution_options opts{ cfg.mode, cfg.trace };
  for ( std::size_t j = 0; j < q.entries.size(); ++j )
  {
    auto const& e = q.entries[j];
    location_decision d{ e.candidate, q.tile, verdict::passthrough, 0u, 0u };
    if ( j < iter_cap )
    {
      auto const r = xb.run( candidates[e.candidate].hist, e.offset, cfg.eth, opts );
      d.outcome = r.discard ? verdict::discard : verdict::keep;
      d.compute_cycles = r.compute_cycles;
      d.init_cycles = r.init_cycles;
    }
    out.push_back( d );
  }
  return out;
}

} // namespace detail

/*! \brief Filters every candidate location on simulated crossbars.
 *
 * Tiles are independent, so with `threads > 1` they are spread over workers;
 * results are still merged in tile order and do not depend on the worker count.
 */
inline filter_run run_filter( std::string_view genome, std::span<candidate const> candidates, filter_config const& cfg )
{
  auto const layout = make_kernel_layout( cfg.geometry );
  auto const tiles = partition( genome.size(), cfg.geometry );
  auto const queues = build_queues( candidates, genome.size(), cfg.geometry );
  auto const cap = iteration_cap( candidates.size(), tiles.size(), cfg.iter_factor );

  std::vector<std::size_t> lengths;
  for ( auto const& q : queues )
    lengths.push_back( q.entries.size() );

  filter_run run;
  auto& st = run.stats;
  st.total = candidates.size();
  st.tiles = tiles.size();
  st.schedule = schedule( lengths, cap, cfg.active_limit ).report;

  std::vector<std::vector<location_decision>> per_tile( tiles.size() );
  auto const workers = cfg.trace ? 1u : std::max( 1u, cfg.threads );
  if ( workers == 1u )
  {
    for ( std::size_t i = 0; i < tiles.size(); ++i )
      per_tile[i] = detail::run_queue( genome, candidates, queues[i], tiles[i], layout, cap, cfg );
  }
  else
  {
    std::vector<std::exception_ptr> errors( workers );
    std::vector<std::thread> pool;
    for ( unsigned w = 0; w < workers; ++w )
      pool.emplace_back( [&, w] {
        try
        {
          for ( std::size_t i = w; i < tiles.size(); i += workers )
            per_tile[i] = detail::run_queue( genome, candidates, queues[i], tiles[i], layout, cap, cfg );
        }
        catch ( ... )
        {
          errors[w] = std::current_exception();
        }
      } );
    for ( auto& th : pool )
      th.join();
    for ( auto const& e : errors )
      if ( e )
        std::rethrow_exception( e );
  }

  for ( auto& decisions : per_tile )
    for ( auto const& d : decisions )
    {
      run.decisions.push_back( d );
      switch ( d.outcome )
      {
      case verdict::keep: ++st.kept; break;
      case verdict::discard: ++st.discarded; break;
      case verdict::passthrough: ++st.passthrough; break;
      }
      st.compute_cycles += d.compute_cycles;
      st.init_cycles += d.init_cycles;
    }
  st.processed = st.kept + st.discarded;
  st.bytes_transferred = bytes_per_location * st.processed;
  return run;
}

} // namespace pimfilter
