#include <pimfilter/io/synth.hpp>
#include <pimfilter/oracle.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <queue>
#include <random>
#include <set>

using namespace pimfilter;

namespace
{

std::vector<std::string> one_edit_neighbours( std::string const& s, std::size_t max_len = SIZE_MAX )
{
  std::vector<std::string> out;
  for ( std::size_t i = 0; i < s.size(); ++i )
  {
    for ( char c : { 'A', 'C', 'G', 'T' } )
      if ( c != s[i] )
      {
        auto t = s;
        t[i] = c;
        out.push_back( t );
      }
    auto d = s;
    d.erase( i, 1 );
    out.push_back( d );
  }
  if ( s.size() < max_len )
    for ( std::size_t i = 0; i <= s.size(); ++i )
      for ( char c : { 'A', 'C', 'G', 'T' } )
      {
        auto t = s;
        t.insert( t.begin() + static_cast<std::ptrdiff_t>( i ), c );
        out.push_back( t );
      }
  return out;
}

/* strings reachable from s with exactly the given number of edits, and no fewer */
std::vector<std::set<std::string>> edit_balls( std::string const& s, int radius )
{
  std::vector<std::set<std::string>> rings( 1, { s } );
  std::set<std::string> seen{ s };
  for ( int r = 1; r <= radius; ++r )
  {
    std::set<std::string> next;
    for ( auto const& x : rings.back() )
      for ( auto& y : one_edit_neighbours( x ) )
        if ( seen.insert( y ).second )
          next.insert( std::move( y ) );
    rings.push_back( std::move( next ) );
  }
  return rings;
}

/* exact edit distance by searching edit scripts from both ends; valid up to 2 * radius */
int brute_force_distance( std::string const& a, std::string const& b, int radius = 2 )
{
  auto const ra = edit_balls( a, radius ), rb = edit_balls( b, radius );
  for ( int d = 0; d <= 2 * radius; ++d )
    for ( int i = std::max( 0, d - radius ); i <= std::min( d, radius ); ++i )
      for ( auto const& x : ra[static_cast<std::size_t>( i )] )
        if ( rb[static_cast<std::size_t>( d - i )].count( x ) )
          return d;
  return -1;
}

std::string random_bases( std::size_t n, std::mt19937_64& rng )
{
  std::string s( n, 'A' );
  for ( auto& c : s )
    c = "ATGC"[rng() % 4u];
  return s;
}

std::string apply_random_edit( std::string s, std::mt19937_64& rng )
{
  auto const kind = s.empty() ? 1u : rng() % 3u;
  if ( kind == 0u )
    s[rng() % s.size()] = "ATGC"[rng() % 4u];
  else if ( kind == 1u )
    s.insert( s.begin() + static_cast<std::ptrdiff_t>( rng() % ( s.size() + 1u ) ), "ATGC"[rng() % 4u] );
  else
    s.erase( rng() % s.size(), 1 );
  return s;
}

base_counts counts( uint32_t a, uint32_t t, uint32_t g, uint32_t c )
{
  base_counts h;
  h.counts = { a, t, g, c };
  return h;
}

} // namespace

TEST( histogram, examples )
{
  std::string acgt;
  for ( int i = 0; i < 25; ++i )
    acgt += "ACGT";
  EXPECT_EQ( oracle::histogram( acgt ), counts( 25, 25, 25, 25 ) );
  EXPECT_EQ( oracle::histogram( "" ), counts( 0, 0, 0, 0 ) );
  EXPECT_EQ( oracle::histogram( "AAAT" ), counts( 3, 1, 0, 0 ) );
  EXPECT_EQ( oracle::histogram( "aaat" ), counts( 3, 1, 0, 0 ) );
  EXPECT_THROW( oracle::histogram( "AANT" ), invalid_base );
}

TEST( histogram, permutation_invariant )
{
  std::mt19937_64 rng( 1 );
  for ( int i = 0; i < 100; ++i )
  {
    auto s = random_bases( 100, rng );
    auto const h = oracle::histogram( s );
    std::shuffle( s.begin(), s.end(), rng );
    EXPECT_EQ( oracle::histogram( s ), h );
    EXPECT_EQ( h.total(), 100u );
  }
}

TEST( base_count_error, examples )
{
  EXPECT_EQ( oracle::base_count_error( counts( 100, 0, 0, 0 ), counts( 99, 1, 0, 0 ) ), 2u );
  EXPECT_EQ( oracle::base_count_error( counts( 7, 8, 9, 10 ), counts( 7, 8, 9, 10 ) ), 0u );
  EXPECT_EQ( oracle::base_count_error( counts( 50, 50, 0, 0 ), counts( 0, 0, 50, 50 ) ), 200u );
}

TEST( should_discard, strict_inequality )
{
  EXPECT_FALSE( oracle::should_discard( 2u, 1u ) );
  EXPECT_TRUE( oracle::should_discard( 3u, 1u ) );
  EXPECT_FALSE( oracle::should_discard( 0u, 0u ) );
  EXPECT_TRUE( oracle::should_discard( 1u, 0u ) );
}

TEST( edit_distance, examples )
{
  EXPECT_EQ( oracle::edit_distance( "AAAA", "AAAA" ), 0u );
  EXPECT_EQ( oracle::edit_distance( "AAAA", "AATA" ), 1u );
  EXPECT_EQ( oracle::edit_distance( "", "ACG" ), 3u );
  EXPECT_EQ( oracle::edit_distance( "ACGT", "" ), 4u );
  EXPECT_EQ( oracle::edit_distance( "ACGT", "CGTA" ), 2u );
}

TEST( edit_distance, exhaustive_over_short_strings )
{
  /* all strings of length <= 4; BFS in the edit graph restricted to that length is exact */
  std::vector<std::string> all{ "" };
  for ( std::size_t i = 0; i < all.size(); ++i )
    if ( all[i].size() < 4u )
      for ( char c : { 'A', 'C', 'G', 'T' } )
        all.push_back( all[i] + c );
  ASSERT_EQ( all.size(), 341u );
  for ( auto const& a : all )
  {
    std::map<std::string, uint32_t> dist{ { a, 0u } };
    std::queue<std::string> q;
    q.push( a );
    while ( !q.empty() )
    {
      auto const x = q.front();
      q.pop();
      for ( auto const& y : one_edit_neighbours( x, 4 ) )
        if ( dist.emplace( y, dist[x] + 1u ).second )
          q.push( y );
    }
    for ( auto const& b : all )
      ASSERT_EQ( oracle::edit_distance( a, b ), dist.at( b ) ) << a << " / " << b;
  }
}

TEST( edit_distance, random_pairs_up_to_length_12 )
{
  std::mt19937_64 rng( 99 );
  for ( int t = 0; t < 200; ++t )
  {
    auto const a = random_bases( 1 + rng() % 12u, rng );
    auto b = a;
    auto const k = rng() % 4u;
    for ( uint64_t i = 0; i < k; ++i )
      b = apply_random_edit( b, rng );
    if ( b.size() > 12u )
      b.pop_back();
    ASSERT_EQ( static_cast<int>( oracle::edit_distance( a, b ) ), brute_force_distance( a, b ) ) << a << " / " << b;
  }
}

TEST( soundness, error_at_most_twice_edit_distance )
{
  std::mt19937_64 rng( 5 );
  for ( int t = 0; t < 10000; ++t )
  {
    auto const a = random_bases( rng() % 40u, rng );
    auto const b = rng() % 2u ? random_bases( rng() % 40u, rng ) : apply_random_edit( a, rng );
    ASSERT_LE( oracle::base_count_error( oracle::histogram( a ), oracle::histogram( b ) ),
               2u * oracle::edit_distance( a, b ) );
  }
}

TEST( soundness, single_edit_changes_error_by_at_most_two )
{
  std::mt19937_64 rng( 6 );
  for ( int t = 0; t < 2000; ++t )
  {
    auto const read = random_bases( 100, rng );
    auto const window = random_bases( 100, rng );
    auto const edited = apply_random_edit( window, rng );
    auto const before = oracle::base_count_error( oracle::histogram( read ), oracle::histogram( window ) );
    auto const after = oracle::base_count_error( oracle::histogram( read ), oracle::histogram( edited ) );
    ASSERT_LE( after > before ? after - before : before - after, 2u );
  }
}

TEST( soundness, reads_within_eth_edits_are_kept )
{
  io::synth_rng rng( 17 );
  auto const genome = io::random_genome( 5000, rng );
  for ( int t = 0; t < 1000; ++t )
  {
    auto const eth = static_cast<uint32_t>( rng.below( 11u ) );
    auto const p = rng.below( 4901u );
    auto const m = io::mutate_window( genome, p, 100, static_cast<uint32_t>( rng.below( eth + 1u ) ), rng );
    auto const window = std::string_view( genome ).substr( p, 100 );
    ASSERT_EQ( m.seq.size(), 100u );
    ASSERT_LE( oracle::edit_distance( m.seq, window ), m.edits );
    ASSERT_FALSE( oracle::should_discard( m.seq, window, eth ) );
  }
}
