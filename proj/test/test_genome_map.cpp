#include <pimfilter/genome_map.hpp>
#include <pimfilter/io/synth.hpp>
#include <pimfilter/oracle.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace pimfilter;

namespace
{

std::vector<candidate> random_candidates( std::string const& genome, std::size_t n, uint64_t seed, bool exact = false )
{
  io::synth_rng rng( seed );
  std::vector<candidate> out;
  for ( std::size_t i = 0; i < n; ++i )
  {
    auto const p = static_cast<uint32_t>( rng.below( genome.size() - 99u ) );
    auto const read = exact ? genome.substr( p, 100 ) : io::random_genome( 100, rng );
    out.push_back( { "r" + std::to_string( i ), read_histogram( oracle::histogram( read ) ), p } );
  }
  return out;
}

} // namespace

TEST( partition, tile_counts )
{
  EXPECT_EQ( tile_count( 3'200'000'000ull ), 500'000u );
  EXPECT_EQ( tile_count( 12'900 ), 2u );
  EXPECT_EQ( tile_count( 6'500 ), 1u );
  EXPECT_EQ( tile_count( 100 ), 1u );
  EXPECT_EQ( tile_count( 6'501 ), 2u );
  EXPECT_EQ( tile_count( 12'901 ), 3u );
  EXPECT_THROW( tile_count( 99 ), std::invalid_argument );

  auto const tiles = partition( 12'900 );
  ASSERT_EQ( tiles.size(), 2u );
  EXPECT_EQ( tiles[0].start, 0u );
  EXPECT_EQ( tiles[1].start, 6'400u );
  EXPECT_EQ( tiles[0].length, 6'500u );
  EXPECT_EQ( tiles[1].length, 6'500u );
}

TEST( route, examples )
{
  EXPECT_EQ( route( 0, 100'000 ), ( route_result{ 0, 0 } ) );
  EXPECT_EQ( route( 6'399, 100'000 ), ( route_result{ 0, 6'399 } ) );
  EXPECT_EQ( route( 6'400, 100'000 ), ( route_result{ 1, 0 } ) );
  /* the last tile also hosts the final stride boundary */
  EXPECT_EQ( route( 12'800, 12'900 ), ( route_result{ 1, 6'400 } ) );
  EXPECT_THROW( route( 12'801, 12'900 ), std::out_of_range );
}

TEST( route, every_window_is_stored_in_its_tile )
{
  io::synth_rng rng( 4 );
  for ( std::size_t len : { 100u, 6'500u, 6'501u, 12'900u, 20'000u, 31'234u } )
  {
    auto const genome = io::random_genome( len, rng );
    auto const tiles = partition( len );
    for ( std::size_t p = 0; p + 100u <= len; ++p )
    {
      auto const r = route( p, len );
      auto const& t = tiles[r.tile];
      ASSERT_LE( r.offset + 100u, t.length ) << "len " << len << " p " << p;
      ASSERT_EQ( genome.substr( t.start + r.offset, 100 ), genome.substr( p, 100 ) );
    }
  }
}

TEST( schedule, uniform_queues_do_not_overflow )
{
  std::vector<std::size_t> const lengths( 10, 3 );
  auto const plan = schedule( lengths, iteration_cap( 30, 10, 5.0 ) );
  EXPECT_EQ( plan.report.iter_cap, 15u );
  EXPECT_EQ( plan.report.overflow, 0u );
  EXPECT_EQ( plan.report.processed, 30u );
  EXPECT_EQ( plan.report.rounds, 3u );
  EXPECT_EQ( plan.report.waves, 3u );
}

TEST( schedule, long_queue_overflows_past_the_cap )
{
  std::vector<std::size_t> lengths( 10, 0 );
  lengths[0] = 100;
  auto const cap = iteration_cap( 100, 10, 5.0 );
  EXPECT_EQ( cap, 50u );
  auto const plan = schedule( lengths, cap );
  EXPECT_EQ( plan.report.overflow, 50u );
  EXPECT_EQ( plan.report.processed, 50u );
}

TEST( schedule, halving_active_arrays_doubles_waves )
{
  std::vector<std::size_t> const lengths( 8, 4 );
  auto const full = schedule( lengths, 100 );
  auto const half = schedule( lengths, 100, 4 );
  EXPECT_EQ( half.report.waves, 2u * full.report.waves );
  for ( auto const& w : half.waves )
    EXPECT_LE( w.size(), 4u );
  std::size_t activations = 0;
  for ( auto const& w : half.waves )
    activations += w.size();
  EXPECT_EQ( activations, 32u );
}

TEST( run_filter, agrees_with_oracle_and_counts_bytes )
{
  io::synth_rng rng( 10 );
  auto const genome = io::random_genome( 40'000, rng );
  auto cands = random_candidates( genome, 300, 2 );
  /* near-miss reads: windows with a few substitutions */
  for ( std::size_t i = 0; i < 100; ++i )
  {
    auto const p = static_cast<uint32_t>( rng.below( genome.size() - 99u ) );
    auto read = genome.substr( p, 100 );
    for ( int k = 0; k < 8; ++k )
      read[rng.below( 100 )] = rng.base();
    cands.push_back( { "n" + std::to_string( i ), read_histogram( oracle::histogram( read ) ), p } );
  }
  filter_config cfg;
  cfg.eth = 3;
  cfg.iter_factor = 100.0;
  auto const run = run_filter( genome, cands, cfg );
  ASSERT_EQ( run.decisions.size(), cands.size() );
  EXPECT_EQ( run.stats.passthrough, 0u );
  for ( auto const& d : run.decisions )
  {
    auto const& c = cands[d.candidate];
    auto const err = oracle::base_count_error( c.hist.counts(), oracle::histogram( std::string_view( genome ).substr( c.position, 100 ) ) );
    EXPECT_EQ( d.outcome == verdict::discard, oracle::should_discard( err, cfg.eth ) );
  }
  EXPECT_EQ( run.stats.bytes_transferred, 13u * run.stats.processed );
  EXPECT_GT( run.stats.discarded, 0u );
  EXPECT_GT( run.stats.kept, 0u );
}

TEST( run_filter, exact_windows_are_never_discarded )
{
  io::synth_rng rng( 11 );
  auto const genome = io::random_genome( 20'000, rng );
  auto const cands = random_candidates( genome, 100, 3, true );
  for ( uint32_t eth : { 0u, 2u } )
  {
    filter_config cfg;
    cfg.eth = eth;
    auto const run = run_filter( genome, cands, cfg );
    EXPECT_EQ( run.stats.discarded, 0u );
  }
}

TEST( run_filter, overflow_is_passthrough_and_never_discarded )
{
  io::synth_rng rng( 12 );
  auto const genome = io::random_genome( 30'000, rng );
  /* all candidates land in tile 0 */
  std::vector<candidate> cands;
  for ( std::size_t i = 0; i < 40; ++i )
  {
    auto const read = io::random_genome( 100, rng );
    cands.push_back( { "r" + std::to_string( i ), read_histogram( oracle::histogram( read ) ), static_cast<uint32_t>( i * 10 ) } );
  }
  filter_config cfg;
  cfg.eth = 0;
  cfg.iter_factor = 1.0; /* 5 tiles: cap = ceil(40 / 5) = 8 */
  auto const run = run_filter( genome, cands, cfg );
  EXPECT_EQ( run.stats.schedule.iter_cap, 8u );
  EXPECT_EQ( run.stats.processed, 8u );
  EXPECT_EQ( run.stats.passthrough, 32u );
  EXPECT_DOUBLE_EQ( run.stats.passthrough_fraction(), 0.8 );
  for ( std::size_t i = 0; i < run.decisions.size(); ++i )
    EXPECT_EQ( run.decisions[i].outcome == verdict::passthrough, i >= 8u );
  EXPECT_EQ( run.stats.bytes_transferred, 13u * 8u );
}

TEST( run_filter, deterministic_across_thread_counts )
{
  io::synth_rng rng( 13 );
  auto const genome = io::random_genome( 60'000, rng );
  auto const cands = random_candidates( genome, 200, 5 );
  filter_config cfg;
  cfg.eth = 20;
  auto const a = run_filter( genome, cands, cfg );
  cfg.threads = 4;
  auto const b = run_filter( genome, cands, cfg );
  ASSERT_EQ( a.decisions.size(), b.decisions.size() );
  for ( std::size_t i = 0; i < a.decisions.size(); ++i )
  {
    EXPECT_EQ( a.decisions[i].candidate, b.decisions[i].candidate );
    EXPECT_EQ( a.decisions[i].outcome, b.decisions[i].outcome );
    EXPECT_EQ( a.decisions[i].compute_cycles, b.decisions[i].compute_cycles );
  }
  EXPECT_EQ( a.stats.compute_cycles, b.stats.compute_cycles );
  EXPECT_EQ( a.stats.init_cycles, b.stats.init_cycles );
  for ( std::size_t i = 1; i < a.decisions.size(); ++i )
    EXPECT_LE( a.decisions[i - 1].tile, a.decisions[i].tile );
}

TEST( run_filter, unroutable_location_is_an_error )
{
  io::synth_rng rng( 14 );
  auto const genome = io::random_genome( 1'000, rng );
  std::vector<candidate> cands{ { "r", read_histogram( oracle::histogram( io::random_genome( 100, rng ) ) ), 901 } };
  EXPECT_THROW( run_filter( genome, cands, {} ), std::out_of_range );
}
