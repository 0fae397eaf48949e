//! Image-method path correction for surface sequences found by ray launching.

use crate::geometry::{incidence_angle, EnvironmentMap, Vec3, MIN_HIT_DISTANCE};

use super::types::InteractionKind;

/// Surface visited by a path: obstruction index and interaction kind.
pub type SurfaceRef = (usize, InteractionKind);

/// Interaction on an exact path, by obstruction index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathInteraction {
    pub obstruction: usize,
    pub kind: InteractionKind,
    pub point: Vec3,
    pub incidence_angle: f64,
}

/// Exact geometric path reconstructed from a surface sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectedPath {
    /// Transmitter, reflection points, receiver (penetrations do not bend the path).
    pub points: Vec<Vec3>,
    /// Every interaction in path order, penetrations included.
    pub interactions: Vec<PathInteraction>,
    pub length: f64,
    pub aod: Vec3,
    pub aoa: Vec3,
}

/// Rebuilds the specular path for `signature` between `tx` and `rx`.
///
/// The receiver is mirrored successively across the reflecting planes (last surface
/// first), the transmitter is joined to the deepest image and the reflection points
/// are unfolded forward. Penetrations do not create images. The path is rejected if a
/// reflection point falls outside its polygon, a leg does not actually cross its
/// reflecting plane, or any leg meets obstructions other than exactly the
/// penetrations listed between its end reflections. Scattering entries are not
/// handled here.
pub fn correct_path(env: &EnvironmentMap, signature: &[SurfaceRef], tx: Vec3, rx: Vec3) -> Option<CorrectedPath> {
    if signature.iter().any(|(_, k)| *k == InteractionKind::Scattering) {
        return None;
    }
    let reflections: Vec<usize> = signature
        .iter()
        .filter(|(_, k)| *k == InteractionKind::Reflection)
        .map(|(i, _)| *i)
        .collect();
    if reflections.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }

    // images[k] is the receiver mirrored across planes k..n-1 (in reverse order).
    let mut images = vec![Vec3::ZERO; reflections.len()];
    let mut img = rx;
    for (k, &obs) in reflections.iter().enumerate().rev() {
        img = env.obstruction(obs).polygon().mirror_point(img);
        images[k] = img;
    }

    let mut points = Vec::with_capacity(reflections.len() + 2);
    points.push(tx);
    let mut cur = tx;
    for (k, &obs) in reflections.iter().enumerate() {
        let poly = env.obstruction(obs).polygon();
        let to_image = images[k] - cur;
        let span = to_image.norm();
        let dir = to_image.normalized()?;
        let t = poly.plane_distance(cur, dir)?;
        if !(t > MIN_HIT_DISTANCE && t < span - MIN_HIT_DISTANCE) {
            return None;
        }
        let p = cur + dir * t;
        if !poly.contains_coplanar(p) {
            return None;
        }
        points.push(p);
        cur = p;
    }
    points.push(rx);

    // Validate every leg against the penetrations recorded between its reflections.
    let mut interactions = Vec::with_capacity(signature.len());
    let mut sig_iter = signature.iter().peekable();
    for leg in 0..points.len() - 1 {
        let (a, b) = (points[leg], points[leg + 1]);
        let len = a.distance(b);
        if len <= MIN_HIT_DISTANCE {
            return None;
        }
        let dir = (b - a) / len;
        let mut skip = Vec::with_capacity(2);
        if leg > 0 {
            skip.push(reflections[leg - 1]);
        }
        if leg < reflections.len() {
            skip.push(reflections[leg]);
        }
        let crossings = env.crossings(a, dir, len, &skip);
        for c in &crossings {
            match sig_iter.next() {
                Some(&(obs, InteractionKind::Penetration)) if obs == c.obstruction => {
                    if env.material_of(obs).is_opaque() {
                        return None;
                    }
                    interactions.push(PathInteraction {
                        obstruction: obs,
                        kind: InteractionKind::Penetration,
                        point: c.point,
                        incidence_angle: c.incidence_angle,
                    });
                }
                _ => return None,
            }
        }
        if leg < reflections.len() {
            match sig_iter.next() {
                Some(&(obs, InteractionKind::Reflection)) if obs == reflections[leg] => {
                    let n = env.obstruction(obs).normal();
                    interactions.push(PathInteraction {
                        obstruction: obs,
                        kind: InteractionKind::Reflection,
                        point: b,
                        incidence_angle: incidence_angle(dir, n),
                    });
                }
                _ => return None,
            }
        }
    }
    if sig_iter.next().is_some() {
        return None;
    }

    let length = points.windows(2).map(|w| w[0].distance(w[1])).sum();
    let aod = (points[1] - points[0]).normalized()?;
    let aoa = (points[points.len() - 2] - rx).normalized()?;
    Some(CorrectedPath {
        points,
        interactions,
        length,
        aod,
        aoa,
    })
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::geometry::Obstruction;
    use crate::propagation::MaterialProfile;

    fn plane_x5(half: f64) -> EnvironmentMap {
        let wall = Obstruction::new(
            "w",
            "m",
            vec![
                Vec3::new(5.0, -half, -half),
                Vec3::new(5.0, half, -half),
                Vec3::new(5.0, half, half),
                Vec3::new(5.0, -half, half),
            ],
        )
        .unwrap();
        let mut mats = BTreeMap::new();
        mats.insert("m".to_string(), MaterialProfile::new("m", 3.0, Some(2.0)));
        EnvironmentMap::new(vec![wall], mats, None).unwrap()
    }

    #[test]
    fn single_bounce_matches_analytic_mirror() {
        let env = plane_x5(10.0);
        let p = correct_path(&env, &[(0, InteractionKind::Reflection)], Vec3::ZERO, Vec3::new(0.0, 2.0, 0.0)).unwrap();
        assert!((p.points[1] - Vec3::new(5.0, 1.0, 0.0)).norm() < 1e-12);
        assert!((p.length - 2.0 * 26f64.sqrt()).abs() < 1e-12);
        let i = p.interactions[0];
        assert!((i.incidence_angle - (1.0f64 / 5.0).atan()).abs() < 1e-12);
    }

    #[test]
    fn penetration_only_is_straight() {
        let env = plane_x5(10.0);
        let rx = Vec3::new(8.0, 1.0, 0.5);
        let p = correct_path(&env, &[(0, InteractionKind::Penetration)], Vec3::ZERO, rx).unwrap();
        assert_eq!(p.points, vec![Vec3::ZERO, rx]);
        assert!((p.length - rx.norm()).abs() < 1e-12);
        // The same straight line without the recorded penetration is blocked.
        assert!(correct_path(&env, &[], Vec3::ZERO, rx).is_none());
    }

    #[test]
    fn reflection_outside_polygon_rejected() {
        let env = plane_x5(0.5);
        assert!(correct_path(&env, &[(0, InteractionKind::Reflection)], Vec3::ZERO, Vec3::new(0.0, 2.0, 0.0)).is_none());
    }

    #[test]
    fn reflection_from_wrong_side_rejected() {
        let env = plane_x5(10.0);
        // TX and RX on opposite sides of the wall.
        assert!(correct_path(&env, &[(0, InteractionKind::Reflection)], Vec3::ZERO, Vec3::new(7.0, 0.0, 0.0)).is_none());
    }
}
