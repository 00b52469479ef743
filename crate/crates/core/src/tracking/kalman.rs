//! Constant-velocity Kalman filter over the state `(x, y, vx, vy)`.

use nalgebra::{Matrix2, Matrix2x4, Matrix4, Vector2, Vector4};

use super::{Track, TrackerParams};
use crate::error::{Error, Result};

fn transition(dt: f64) -> Matrix4<f64> {
    let mut f = Matrix4::identity();
    f[(0, 2)] = dt;
    f[(1, 3)] = dt;
    f
}

/// White-noise-acceleration process covariance, `q·[[dt⁴/4, dt³/2], [dt³/2, dt²]]` per axis.
pub fn process_noise(dt: f64, q: f64) -> Matrix4<f64> {
    let pp = q * dt.powi(4) / 4.0;
    let pv = q * dt.powi(3) / 2.0;
    let vv = q * dt * dt;
    Matrix4::new(
        pp, 0.0, pv, 0.0, //
        0.0, pp, 0.0, pv, //
        pv, 0.0, vv, 0.0, //
        0.0, pv, 0.0, vv,
    )
}

fn observation() -> Matrix2x4<f64> {
    Matrix2x4::new(
        1.0, 0.0, 0.0, 0.0, //
        0.0, 1.0, 0.0, 0.0,
    )
}

pub(crate) fn measurement_noise(params: &TrackerParams) -> Matrix2<f64> {
    Matrix2::new(
        params.measurement_noise_std_x_m().powi(2),
        0.0,
        0.0,
        params.measurement_noise_std_y_m().powi(2),
    )
}

fn symmetrize(p: &Matrix4<f64>) -> Matrix4<f64> {
    (p + p.transpose()) * 0.5
}

pub fn kf_predict(track: &Track, dt_s: f64, params: &TrackerParams) -> Result<Track> {
    if !(dt_s > 0.0 && dt_s.is_finite()) {
        return Err(Error::NonPositiveDt(dt_s));
    }
    let f = transition(dt_s);
    let mut out = track.clone();
    out.state = f * track.state;
    out.covariance = symmetrize(
        &(f * track.covariance * f.transpose()
            + process_noise(dt_s, params.process_noise_intensity())),
    );
    Ok(out)
}

/// Innovation `z - Hx` and its covariance `HPHᵀ + R`.
pub fn innovation(track: &Track, z: (f64, f64), params: &TrackerParams) -> (Vector2<f64>, Matrix2<f64>) {
    let h = observation();
    let nu = Vector2::new(z.0, z.1) - h * track.state;
    let s = h * track.covariance * h.transpose() + measurement_noise(params);
    (nu, s)
}

/// Squared Mahalanobis distance of `z` from the track's predicted position.
pub fn mahalanobis_sq(track: &Track, z: (f64, f64), params: &TrackerParams) -> Result<f64> {
    let (nu, s) = innovation(track, z, params);
    let s_inv = s.try_inverse().ok_or(Error::SingularInnovation {
        track_id: track.track_id,
    })?;
    Ok((nu.transpose() * s_inv * nu)[(0, 0)])
}

/// Linear update with the Joseph-form covariance. Returns the updated track
/// and the squared Mahalanobis distance of the innovation.
pub fn kf_update(track: &Track, z: (f64, f64), params: &TrackerParams) -> Result<(Track, f64)> {
    let h = observation();
    let r = measurement_noise(params);
    let (nu, s) = innovation(track, z, params);
    let s_inv = s.try_inverse().ok_or(Error::SingularInnovation {
        track_id: track.track_id,
    })?;
    let gain = track.covariance * h.transpose() * s_inv;
    let i_kh = Matrix4::identity() - gain * h;

    let mut out = track.clone();
    out.state = track.state + gain * nu;
    out.covariance = symmetrize(
        &(i_kh * track.covariance * i_kh.transpose() + gain * r * gain.transpose()),
    );
    Ok((out, (nu.transpose() * s_inv * nu)[(0, 0)]))
}

/// Covariance of a freshly spawned track at `(x, y)`.
pub fn initial_covariance(params: &TrackerParams) -> Matrix4<f64> {
    let sv = params.initial_velocity_std_m_s().powi(2);
    Matrix4::from_diagonal(&Vector4::new(
        params.measurement_noise_std_x_m().powi(2),
        params.measurement_noise_std_y_m().powi(2),
        sv,
        sv,
    ))
}
