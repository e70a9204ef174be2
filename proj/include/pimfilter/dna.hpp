/*!
  \file dna.hpp
  \brief Bases, their two-bit codes and per-base counts
*/

#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pimfilter
{

/*! \brief Nucleotide with its two-bit storage code (high bit first): A=00, T=01, G=10, C=11. */
enum class base : uint8_t
{
  A = 0b00,
  T = 0b01,
  G = 0b10,
  C = 0b11
};

inline constexpr std::array<base, 4> all_bases = { base::A, base::T, base::G, base::C };

class invalid_base : public std::invalid_argument
{
public:
  invalid_base( char letter, std::size_t position )
      : std::invalid_argument( "invalid base '" + std::string( 1, letter ) + "' at position " + std::to_string( position ) ),
        letter_( letter ), position_( position )
  {
  }

  char letter() const { return letter_; }
  std::size_t position() const { return position_; }

private:
  char letter_;
  std::size_t position_;
};

/*! \brief Parses an upper- or lower-case A/C/G/T letter; anything else throws. */
inline base to_base( char letter, std::size_t position = 0 )
{
  switch ( letter )
  {
  case 'A': case 'a': return base::A;
  case 'T': case 't': return base::T;
  case 'G': case 'g': return base::G;
  case 'C': case 'c': return base::C;
  default: throw invalid_base( letter, position );
  }
}

inline char to_char( base b )
{
  constexpr char letters[] = { 'A', 'T', 'G', 'C' };
  return letters[static_cast<uint8_t>( b )];
}

/*! \brief Two-bit code of a base letter as (high, low). */
inline std::array<bool, 2> encode_base( char letter )
{
  auto const code = static_cast<uint8_t>( to_base( letter ) );
  return { static_cast<bool>( ( code >> 1 ) & 1u ), static_cast<bool>( code & 1u ) };
}

inline base decode_base( bool high, bool low )
{
  return static_cast<base>( ( high ? 2u : 0u ) | ( low ? 1u : 0u ) );
}

/*! \brief Occurrences of A, T, G and C (indexed by the base code). */
struct base_counts
{
  std::array<uint32_t, 4> counts{};

  uint32_t& operator[]( base b ) { return counts[static_cast<uint8_t>( b )]; }
  uint32_t operator[]( base b ) const { return counts[static_cast<uint8_t>( b )]; }

  uint32_t total() const { return counts[0] + counts[1] + counts[2] + counts[3]; }

  friend bool operator==( base_counts const&, base_counts const& ) = default;
};

/*! \brief Throws `invalid_base` at the first character outside {A,C,G,T}, case-insensitively. */
inline void require_acgt( std::string_view seq )
{
  for ( std::size_t i = 0; i < seq.size(); ++i )
    to_base( seq[i], i );
}

} // namespace pimfilter
