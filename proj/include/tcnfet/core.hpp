/*!
  \file core.hpp
  \brief Ternary values, algebra, behavioral gate models and radix-3 arithmetic

  Everything in this header is a pure function of its arguments.  The
  behavioral models here are the reference that every switch-level
  simulation in the library is compared against.
*/

#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tcnfet
{

/*! \brief One ternary digit: 0, 1 or 2.

  Logic levels map to 0 V, VDD/2 and VDD.
*/
class trit
{
public:
  constexpr trit() = default;

  constexpr explicit trit( int v )
      : value_( check( v ) )
  {
  }

  constexpr int value() const { return value_; }

  constexpr auto operator<=>( trit const& ) const = default;

  static constexpr std::array<trit, 3> all() { return { trit{ 0 }, trit{ 1 }, trit{ 2 } }; }

  /*! \brief Parses '0', '1' or '2'. */
  static std::optional<trit> from_char( char c )
  {
    if ( c < '0' || c > '2' )
      return std::nullopt;
    return trit{ c - '0' };
  }

  constexpr char symbol() const { return static_cast<char>( '0' + value_ ); }

private:
  static constexpr std::uint8_t check( int v )
  {
    if ( v < 0 || v > 2 )
      throw std::out_of_range( "trit value must be 0, 1 or 2" );
    return static_cast<std::uint8_t>( v );
  }

  std::uint8_t value_{ 0 };
};

/*! \brief A trit or the high-impedance marker. */
class trit_hz
{
public:
  constexpr trit_hz() = default;
  constexpr trit_hz( trit t ) : value_( t ) {}

  static constexpr trit_hz hz() { return trit_hz{}; }

  constexpr bool is_hz() const { return !value_.has_value(); }

  /*! \brief The driven value; throws if HZ. */
  constexpr trit value() const
  {
    if ( !value_ )
      throw std::logic_error( "high-impedance state has no logic value" );
    return *value_;
  }

  constexpr bool operator==( trit_hz const& ) const = default;

  /* HZ sorts after 2 so that canonical orderings list driven values first */
  constexpr std::strong_ordering operator<=>( trit_hz const& other ) const
  {
    int const lhs = value_ ? value_->value() : 3;
    int const rhs = other.value_ ? other.value_->value() : 3;
    return lhs <=> rhs;
  }

  constexpr char symbol() const { return value_ ? value_->symbol() : 'Z'; }

  static std::optional<trit_hz> from_char( char c )
  {
    if ( c == 'Z' || c == 'z' )
      return hz();
    if ( auto t = trit::from_char( c ) )
      return trit_hz{ *t };
    return std::nullopt;
  }

private:
  std::optional<trit> value_;
};

inline std::string to_string( trit t ) { return std::string( 1, t.symbol() ); }
inline std::string to_string( trit_hz t ) { return std::string( 1, t.symbol() ); }

/* ternary algebra */

constexpr trit t_max( trit a, trit b ) { return std::max( a, b ); }
constexpr trit t_min( trit a, trit b ) { return std::min( a, b ); }
constexpr trit t_not( trit a ) { return trit{ 2 - a.value() }; }

constexpr trit sti( trit a ) { return t_not( a ); }
constexpr trit pti( trit a ) { return a.value() == 2 ? trit{ 0 } : trit{ 2 }; }
constexpr trit nti( trit a ) { return a.value() == 0 ? trit{ 2 } : trit{ 0 }; }

/* tri-state gates: S = 0 function, S = 1 high impedance, S = 2 complement */

namespace detail
{
constexpr trit_hz tri_state( trit s, trit f )
{
  switch ( s.value() )
  {
  case 0:
    return f;
  case 2:
    return t_not( f );
  default:
    return trit_hz::hz();
  }
}
} // namespace detail

constexpr trit_hz tri_buffer_not( trit s, trit in ) { return detail::tri_state( s, in ); }
constexpr trit_hz tri_and_nand( trit s, trit a, trit b ) { return detail::tri_state( s, t_min( a, b ) ); }
constexpr trit_hz tri_or_nor( trit s, trit a, trit b ) { return detail::tri_state( s, t_max( a, b ) ); }

/* radix-3 arithmetic */

struct add_result
{
  trit sum;
  trit carry;

  constexpr bool operator==( add_result const& ) const = default;
};

/*! \brief Single-digit full adder; the carry-in must be 0 or 1. */
constexpr add_result full_add( trit a, trit b, trit cin )
{
  if ( cin.value() == 2 )
    throw std::invalid_argument( "carry-in must be 0 or 1" );
  int const total = a.value() + b.value() + cin.value();
  return { trit{ total % 3 }, trit{ total / 3 } };
}

/*! \brief Little-endian multi-digit ternary number. */
class ternary_word
{
public:
  ternary_word() = default;

  explicit ternary_word( std::vector<trit> digits )
      : digits_( std::move( digits ) )
  {
    if ( digits_.empty() )
      throw std::invalid_argument( "ternary word must have at least one digit" );
  }

  /*! \brief Decomposes `value` into `width` digits; value must fit. */
  static ternary_word from_int( std::uint64_t value, std::size_t width )
  {
    if ( width == 0 )
      throw std::invalid_argument( "ternary word must have at least one digit" );
    std::vector<trit> digits;
    digits.reserve( width );
    for ( std::size_t i = 0; i < width; ++i )
    {
      digits.emplace_back( static_cast<int>( value % 3 ) );
      value /= 3;
    }
    if ( value != 0 )
      throw std::out_of_range( "value does not fit in the requested width" );
    return ternary_word{ std::move( digits ) };
  }

  std::size_t width() const { return digits_.size(); }
  trit operator[]( std::size_t i ) const { return digits_.at( i ); }
  std::vector<trit> const& digits() const { return digits_; }

  std::uint64_t to_int() const
  {
    std::uint64_t v = 0;
    for ( auto it = digits_.rbegin(); it != digits_.rend(); ++it )
      v = v * 3 + static_cast<std::uint64_t>( it->value() );
    return v;
  }

  bool operator==( ternary_word const& ) const = default;

private:
  std::vector<trit> digits_;
};

struct add_sub_result
{
  ternary_word out;
  trit carry;

  bool operator==( add_sub_result const& ) const = default;
};

/*! \brief Ripple-carry adder/subtractor.

  With `mode` 0 the result is `a + b`.  With `mode` 2 every digit of `a`
  is complemented and a carry of 1 is injected, so `out` is
  `b - a (mod 3^width)` and the carry is 1 exactly when `b >= a`.
  Mode 1 has no arithmetic meaning and is rejected.
*/
inline add_sub_result add_sub( trit mode, ternary_word const& a, ternary_word const& b )
{
  if ( mode.value() == 1 )
    throw std::invalid_argument( "add/sub mode must be 0 (add) or 2 (subtract)" );
  if ( a.width() != b.width() )
    throw std::invalid_argument( "operand widths differ" );

  bool const subtract = mode.value() == 2;
  trit carry{ subtract ? 1 : 0 };
  std::vector<trit> out;
  out.reserve( a.width() );
  for ( std::size_t i = 0; i < a.width(); ++i )
  {
    auto const r = full_add( subtract ? t_not( a[i] ) : a[i], b[i], carry );
    out.push_back( r.sum );
    carry = r.carry;
  }
  return { ternary_word{ std::move( out ) }, carry };
}

/*! \brief Control signals C1..C4 of the tri-state ALU. */
struct control_word
{
  trit c1, c2, c3, c4;

  constexpr bool operator==( control_word const& ) const = default;
};

/*! \brief Decodes the (S0, S1) selector into the four gate controls.

  C1..C3 steer the Buffer/NOT, AND/NAND and OR/NOR gates; C4 enables the
  arithmetic unit's output buffer (0) or parks it in HZ (1).
*/
constexpr control_word control_signals( trit s0, trit s1 )
{
  if ( s0.value() == 1 )
    return { trit{ 1 }, trit{ 1 }, trit{ 1 }, trit{ 0 } };

  trit const active = s0; /* 0 selects the function, 2 its complement */
  trit const idle{ 1 };
  return { s1.value() == 0 ? active : idle,
           s1.value() == 1 ? active : idle,
           s1.value() == 2 ? active : idle,
           trit{ 1 } };
}

struct alu_result
{
  trit_hz out;
  trit_hz carry;

  constexpr bool operator==( alu_result const& ) const = default;
};

/*! \brief Behavioral model of the nine-operation ternary ALU.

  S0 = 1 selects arithmetic (S1 = 0 add, 1 increment, 2 subtract B - A),
  anything else selects logic (S0 = 0 Buffer/AND/OR, S0 = 2 NOT/NAND/NOR).
  Logic operations leave the carry in HZ.  Increment ignores B and the
  carry-in; subtract forces the carry-in to 1.
*/
constexpr alu_result alu_behavioral( trit s0, trit s1, trit a, trit b, trit cin )
{
  if ( cin.value() == 2 )
    throw std::invalid_argument( "carry-in must be 0 or 1" );

  if ( s0.value() == 1 )
  {
    add_result r{};
    switch ( s1.value() )
    {
    case 0:
      r = full_add( a, b, cin );
      break;
    case 1:
      r = full_add( a, trit{ 0 }, trit{ 1 } );
      break;
    default:
      r = full_add( t_not( a ), b, trit{ 1 } );
      break;
    }
    return { r.sum, r.carry };
  }

  trit_hz out;
  switch ( s1.value() )
  {
  case 0:
    out = tri_buffer_not( s0, a );
    break;
  case 1:
    out = tri_and_nand( s0, a, b );
    break;
  default:
    out = tri_or_nor( s0, a, b );
    break;
  }
  return { out, trit_hz::hz() };
}

} // namespace tcnfet
