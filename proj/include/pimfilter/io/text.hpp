/*!
  \file text.hpp
  \brief Locale-independent number formatting and parse errors for the text formats
*/

#pragma once

#include <charconv>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>

namespace pimfilter::io
{

/*! \brief Input error carrying the 1-based line (and column when known) it was found at. */
class parse_error : public std::runtime_error
{
public:
  parse_error( std::string const& what, std::size_t line, std::size_t column = 0 )
      : std::runtime_error( "line " + std::to_string( line ) + ( column ? ", column " + std::to_string( column ) : "" ) + ": " + what ),
        line_( line ), column_( column )
  {
  }

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

/*! \brief Fixed-point decimal with `precision` digits after the point. */
inline std::string format_fixed( double v, int precision = 3 )
{
  char buf[64];
  auto const r = std::to_chars( buf, buf + sizeof( buf ), v, std::chars_format::fixed, precision );
  return std::string( buf, r.ptr );
}

/*! \brief Shortest round-tripping representation. */
inline std::string format_number( double v )
{
  char buf[64];
  auto const r = std::to_chars( buf, buf + sizeof( buf ), v );
  return std::string( buf, r.ptr );
}

inline bool parse_u32( std::string_view s, uint32_t& out )
{
  if ( s.empty() )
    return false;
  auto const r = std::from_chars( s.data(), s.data() + s.size(), out );
  return r.ec == std::errc{} && r.ptr == s.data() + s.size();
}

inline std::string_view trim_cr( std::string_view line )
{
  if ( !line.empty() && line.back() == '\r' )
    line.remove_suffix( 1 );
  return line;
}

} // namespace pimfilter::io
