/*!
  \file device.hpp
  \brief CNFET device model: chirality, diameter, threshold and conduction
*/

#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tcnfet
{

/*! \brief Nanotube chirality vector (n, m), kept in canonical form n >= m. */
class chirality
{
public:
  constexpr chirality() = default;

  /* (n, m) and (m, n) roll the same tube; the pair is stored sorted */
  constexpr chirality( int n, int m )
      : n_( std::max( n, m ) ), m_( std::min( n, m ) )
  {
    if ( n < 0 || m < 0 )
      throw std::invalid_argument( "chirality indices must be non-negative" );
    if ( n == 0 && m == 0 )
      throw std::invalid_argument( "chirality (0,0) is not a nanotube" );
  }

  constexpr int n() const { return n_; }
  constexpr int m() const { return m_; }

  constexpr bool operator==( chirality const& ) const = default;

  std::string to_string() const
  {
    return "(" + std::to_string( n_ ) + "," + std::to_string( m_ ) + ")";
  }

private:
  int n_{ 1 };
  int m_{ 0 };
};

/* the two tubes used by every library cell */
inline constexpr chirality high_vth_tube{ 10, 0 };
inline constexpr chirality low_vth_tube{ 19, 0 };

/*! \brief Tube diameter in nm: 0.0783 * sqrt(n^2 + m^2 + nm). */
inline double cnt_diameter( chirality c )
{
  double const n = c.n();
  double const m = c.m();
  return 0.0783 * std::sqrt( n * n + m * m + n * m );
}

/*! \brief True when n - m is a multiple of three (the tube conducts like a metal). */
constexpr bool cnt_is_metallic( chirality c ) { return ( c.n() - c.m() ) % 3 == 0; }

/*! \brief Threshold voltage magnitude in V for a tube of diameter `d` nm. */
inline double cnfet_threshold( double diameter_nm )
{
  if ( !( diameter_nm > 0.0 ) )
    throw std::invalid_argument( "nanotube diameter must be positive" );
  return 0.436 / diameter_nm;
}

enum class device_kind
{
  p,
  n
};

inline char to_char( device_kind k ) { return k == device_kind::p ? 'P' : 'N'; }

struct cnfet_params
{
  device_kind kind{ device_kind::n };
  chirality tube;
  double diameter{ 0.0 };
  double vth{ 0.0 };

  static cnfet_params nominal( device_kind kind, chirality tube )
  {
    return with_diameter( kind, tube, cnt_diameter( tube ) );
  }

  static cnfet_params with_diameter( device_kind kind, chirality tube, double diameter )
  {
    return { kind, tube, diameter, cnfet_threshold( diameter ) };
  }
};

/*! \brief Switch-level conduction test.

  `v_rail` is the reference rail of the device's network (VDD for P, GND
  for N).  Equality with the threshold does not conduct.
*/
inline bool device_conducts( cnfet_params const& p, double v_gate, double v_rail )
{
  if ( p.kind == device_kind::n )
    return v_gate - v_rail > p.vth;
  return v_rail - v_gate > p.vth;
}

/*! \brief Gaussian diameter spread with symmetric truncation.

  The default spread puts the 3-sigma tails at +/-15 % of the nominal diameter.
*/
struct diameter_perturbation
{
  double sigma_fraction{ 0.05 };
  double truncation{ 3.0 };

  void check() const
  {
    if ( !( sigma_fraction >= 0.0 ) )
      throw std::invalid_argument( "sigma fraction must be non-negative" );
    if ( !( truncation > 0.0 ) )
      throw std::invalid_argument( "truncation must be positive" );
  }
};

/*! \brief Applies one standard-normal draw to a nominal diameter. */
inline double perturb_diameter( double nominal, diameter_perturbation const& pert, double random_draw )
{
  if ( !( nominal > 0.0 ) )
    throw std::invalid_argument( "nominal diameter must be positive" );
  pert.check();
  double const z = std::clamp( random_draw, -pert.truncation, pert.truncation );
  double const d = nominal * ( 1.0 + pert.sigma_fraction * z );
  if ( !( d > 0.0 ) )
    throw std::domain_error( "perturbation produced a non-positive diameter" );
  return d;
}

} // namespace tcnfet
