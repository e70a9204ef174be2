/*!
  \file synth.hpp
  \brief Seeded synthetic genomes, reads and candidate lists

  All draws go through `synth_rng`, which only uses the fully specified
  mt19937_64 engine, so a seed gives the same corpus on every platform.
*/

#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pimfilter::io
{

class synth_rng
{
public:
  explicit synth_rng( uint64_t seed ) : engine_( seed ) {}

  /*! \brief Uniform integer in [0, n). */
  uint64_t below( uint64_t n )
  {
    if ( n <= 1u )
      return 0u;
    auto const limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t v;
    do
      v = engine_();
    while ( v >= limit );
    return v % n;
  }

  char base() { return "ATGC"[below( 4u )]; }

  char other_base( char b )
  {
    char c;
    do
      c = base();
    while ( c == b );
    return c;
  }

private:
  std::mt19937_64 engine_;
};

inline std::string random_genome( std::size_t length, synth_rng& rng )
{
  std::string g( length, 'A' );
  for ( auto& c : g )
    c = rng.base();
  return g;
}

struct mutated_read
{
  std::string seq;
  /*! bound on the edit distance to the source window */
  uint32_t edits{};
};

/*! \brief Applies random edits to the window at `position` while keeping the read length.
 *
 * A substitution costs one edit. An insertion or deletion is paired with a
 * trim or extension at the read's end to keep its length, so it costs two;
 * it is only drawn while at least two edits remain. The result is within
 * `budget` edits of the window.
 */
inline mutated_read mutate_window( std::string_view genome, std::size_t position, std::size_t read_length, uint32_t budget,
                                   synth_rng& rng )
{
  std::string read( genome.substr( position, read_length ) );
  std::size_t next = position + read_length; /* genome base used to extend after a deletion */
  uint32_t used = 0;
  while ( used < budget )
  {
    auto const kind = budget - used >= 2u ? rng.below( 3u ) : 0u;
    auto const i = rng.below( read_length );
    if ( kind == 0u )
    {
      read[i] = rng.other_base( read[i] );
      used += 1u;
    }
    else if ( kind == 1u )
    {
      read.insert( read.begin() + static_cast<std::ptrdiff_t>( i ), rng.base() );
      read.pop_back();
      used += 2u;
    }
    else
    {
      read.erase( read.begin() + static_cast<std::ptrdiff_t>( i ) );
      read.push_back( next < genome.size() ? genome[next++] : rng.base() );
      used += 2u;
    }
  }
  return { std::move( read ), used };
}

struct synth_options
{
  std::size_t genome_length = 100'000u;
  std::size_t reads = 100u;
  uint32_t edits = 0u;
  /*! extra random locations listed for every read besides its true one */
  std::size_t decoys = 0u;
  uint32_t read_length = 100u;
  uint64_t seed = 1u;
};

struct synth_candidate
{
  std::string read_id;
  std::string read;
  uint32_t position{};
  bool true_location{};
  uint32_t edits{};
};

struct synth_corpus
{
  std::string genome;
  std::vector<synth_candidate> candidates;
};

inline synth_corpus synthesize( synth_options const& o )
{
  if ( o.genome_length < o.read_length )
    throw std::invalid_argument( "synthetic genome must hold at least one read" );
  synth_rng rng( o.seed );
  synth_corpus c;
  c.genome = random_genome( o.genome_length, rng );
  auto const positions = o.genome_length - o.read_length + 1u;
  for ( std::size_t r = 0; r < o.reads; ++r )
  {
    auto const id = "r" + std::to_string( r + 1u );
    auto const p = rng.below( positions );
    auto m = mutate_window( c.genome, p, o.read_length, o.edits, rng );
    c.candidates.push_back( { id, m.seq, static_cast<uint32_t>( p ), true, m.edits } );
    for ( std::size_t d = 0; d < o.decoys; ++d )
      c.candidates.push_back( { id, m.seq, static_cast<uint32_t>( rng.below( positions ) ), false, m.edits } );
  }
  return c;
}

} // namespace pimfilter::io
