//! Small named filtrations with known persistence and volumes.

use crate::complex::{canonical_sort, Filtration, Simplex};
use crate::geometry::PointCloud;

fn s(v: &[u32]) -> Simplex {
    Simplex::new(v.iter().copied()).expect("fixture simplex")
}

fn sorted(ambient: usize, list: &[(&[u32], f64)], points: Option<PointCloud>) -> Filtration {
    canonical_sort(ambient, list.iter().map(|(v, x)| (s(v), *x)).collect(), points).expect("fixture is valid")
}

/// Position in the list is both index and value.
fn in_order(ambient: usize, list: Vec<Vec<u32>>) -> Filtration {
    let raw = list.into_iter().enumerate().map(|(i, v)| (Simplex::new(v).expect("fixture simplex"), i as f64)).collect();
    Filtration::from_ordered(ambient, raw, None).expect("fixture is valid")
}

fn planar(points: &[[f64; 2]]) -> PointCloud {
    PointCloud::new(2, points.iter().map(|p| p.to_vec()).collect(), None).expect("fixture points")
}

/// Three vertices, three edges, one triangle (indices 0..=6, last edge at 5).
pub fn filled_triangle() -> Filtration {
    sorted(
        2,
        &[(&[0], 0.0), (&[1], 0.0), (&[2], 0.0), (&[0, 1], 1.0), (&[0, 2], 1.0), (&[1, 2], 1.0), (&[0, 1, 2], 2.0)],
        None,
    )
}

/// Four vertices and the four edges of a square; the loop never dies.
pub fn hollow_square() -> Filtration {
    sorted(
        2,
        &[(&[0], 0.0), (&[1], 0.0), (&[2], 0.0), (&[3], 0.0), (&[0, 1], 1.0), (&[1, 2], 1.0), (&[2, 3], 1.0), (&[0, 3], 1.0)],
        None,
    )
}

/// Square split by the diagonal 0–2. The first triangle fills the diagonal loop at once;
/// the second kills the loop closed by edge 2–3.
pub fn square_with_diagonal() -> Filtration {
    sorted(
        2,
        &[
            (&[0], 0.0),
            (&[1], 0.0),
            (&[2], 0.0),
            (&[3], 0.0),
            (&[0, 1], 1.0),
            (&[1, 2], 1.0),
            (&[0, 2], 1.2),
            (&[0, 1, 2], 1.2),
            (&[0, 3], 1.5),
            (&[2, 3], 1.5),
            (&[0, 2, 3], 2.5),
        ],
        Some(planar(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])),
    )
}

/// A rectangle with a vertical chord and a pointed right end.
///
/// The outer boundary closes at value 2, the chord 1–4 at value 3. The right pentagon
/// (1, 2, 6, 3, 4) fills at value 4 and the left square (0, 1, 4, 5) at value 5, so the
/// nonzero degree-1 diagram is {(2, 5), (3, 4)}. For the pair (3, 4) the shortest
/// representative is the left square's boundary while the volume is the right pentagon.
pub fn chord_rectangle() -> Filtration {
    let v: &[(&[u32], f64)] = &[
        (&[0], 1.0),
        (&[1], 1.0),
        (&[2], 1.0),
        (&[3], 1.0),
        (&[4], 1.0),
        (&[5], 1.0),
        (&[6], 1.0),
        (&[0, 1], 2.0),
        (&[1, 2], 2.0),
        (&[2, 6], 2.0),
        (&[3, 6], 2.0),
        (&[3, 4], 2.0),
        (&[4, 5], 2.0),
        (&[0, 5], 2.0),
        (&[1, 4], 3.0),
        (&[1, 3], 4.0),
        (&[1, 6], 4.0),
        (&[1, 2, 6], 4.0),
        (&[1, 3, 6], 4.0),
        (&[1, 3, 4], 4.0),
        (&[0, 4], 5.0),
        (&[0, 1, 4], 5.0),
        (&[0, 4, 5], 5.0),
    ];
    sorted(2, v, Some(planar(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [0.0, 1.0], [3.0, 0.5]])))
}

/// Outer triangle (0, 1, 2) around an inner triangle (3, 4, 5), joined by a triangulated annulus.
///
/// The inner loop (value 2) dies at the inner triangle (value 3); the outer loop (value 1) dies
/// at the last annulus triangle (value 9). Rungs and their triangles share values.
pub fn double_annulus() -> Filtration {
    let v: &[(&[u32], f64)] = &[
        (&[0], 0.0),
        (&[1], 0.0),
        (&[2], 0.0),
        (&[3], 0.0),
        (&[4], 0.0),
        (&[5], 0.0),
        (&[0, 1], 1.0),
        (&[1, 2], 1.0),
        (&[0, 2], 1.0),
        (&[3, 4], 2.0),
        (&[4, 5], 2.0),
        (&[3, 5], 2.0),
        (&[3, 4, 5], 3.0),
        (&[0, 3], 4.0),
        (&[1, 3], 4.0),
        (&[0, 1, 3], 4.0),
        (&[1, 4], 5.0),
        (&[1, 3, 4], 5.0),
        (&[2, 4], 6.0),
        (&[1, 2, 4], 6.0),
        (&[2, 5], 7.0),
        (&[2, 4, 5], 7.0),
        (&[0, 5], 8.0),
        (&[0, 2, 5], 8.0),
        (&[0, 3, 5], 9.0),
    ];
    sorted(2, v, Some(planar(&[[0.0, 0.0], [6.0, 0.0], [3.0, 5.0], [2.0, 1.0], [4.0, 1.0], [3.0, 3.0]])))
}

fn annulus(l: [u32; 3], c: [u32; 3]) -> Vec<Vec<u32>> {
    (0..3)
        .flat_map(|i| {
            let j = (i + 1) % 3;
            [vec![l[i], l[j], c[i]], vec![l[j], c[i], c[j]]]
        })
        .map(|mut t| {
            t.sort_unstable();
            t
        })
        .collect()
}

/// Triangles in order of the two tubes from loop (0, 1, 2) to triangle (3, 4, 5).
pub fn tube_triangles() -> [Vec<Vec<u32>>; 2] {
    let (l, c, m1, m2) = ([0, 1, 2], [3, 4, 5], [6, 7, 8], [9, 10, 11]);
    [[annulus(l, m1), annulus(m1, c)].concat(), [annulus(l, m2), annulus(m2, c)].concat()]
}

/// Loop (0, 1, 2) and triangle (3, 4, 5) joined by two triangulated tubes with disjoint middle
/// rings. The pair killed by triangle (3, 4, 5) has two optimal volumes, one per tube.
pub fn two_tubes() -> Filtration {
    let mut list: Vec<Vec<u32>> = (0..12).map(|v| vec![v]).collect();
    list.extend([vec![0, 1], vec![1, 2], vec![0, 2], vec![3, 4], vec![4, 5], vec![3, 5]]);
    let [a, b] = tube_triangles();
    let add = |t: &Vec<u32>, list: &mut Vec<Vec<u32>>| {
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let e = vec![t[i], t[j]];
            if !list.contains(&e) {
                list.push(e);
            }
        }
        list.push(t.clone());
    };
    for (x, y) in a.iter().zip(&b) {
        add(x, &mut list);
        add(y, &mut list);
    }
    add(&vec![3, 4, 5], &mut list);
    in_order(3, list)
}

/// A cone over a triangulated projective plane, with a filtration where one degree-1 pair
/// has a volume LP whose cheapest solution gives the birth simplex coefficient zero.
///
/// Pair (12, 48) in 0-based indices: without the nonzero-birth constraint the ℓ¹ optimum is
/// a half-integral chain of cost 8; with it, an integral volume of cost 10.
pub fn projective_cone() -> Filtration {
    let list: [&[u32]; 51] = [
        &[2], &[1], &[1, 2], &[5], &[2, 5], &[4], &[7], &[2, 7], &[4, 7], &[5, 7], &[6], &[1, 6], &[2, 6],
        &[4, 5], &[4, 5, 7], &[2, 4], &[0], &[0, 1], &[0, 2], &[0, 4], &[0, 6], &[0, 1, 2], &[1, 5], &[1, 4],
        &[5, 6], &[1, 5, 6], &[2, 5, 6], &[1, 2, 4], &[2, 4, 5], &[0, 5], &[0, 1, 5], &[0, 4, 5], &[3], &[0, 3],
        &[1, 3], &[2, 3], &[3, 4], &[3, 5], &[3, 6], &[3, 7], &[0, 2, 3], &[0, 3, 4], &[0, 3, 6], &[1, 3, 4],
        &[1, 3, 5], &[2, 3, 5], &[2, 3, 6], &[2, 3, 7], &[3, 4, 7], &[0, 1, 6], &[2, 5, 7],
    ];
    in_order(3, list.iter().map(|v| v.to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::validate_filtration;

    #[test]
    fn fixtures_are_valid() {
        for f in [
            filled_triangle(),
            hollow_square(),
            square_with_diagonal(),
            chord_rectangle(),
            double_annulus(),
            two_tubes(),
            projective_cone(),
        ] {
            assert!(validate_filtration(&f).ok);
        }
    }

    #[test]
    fn fixture_sizes() {
        assert_eq!(filled_triangle().len(), 7);
        assert_eq!(hollow_square().len(), 8);
        assert_eq!(two_tubes().len(), 73);
        assert_eq!(projective_cone().len(), 51);
    }
}
