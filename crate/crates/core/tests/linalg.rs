use proptest::prelude::*;
use syntomic_core::linalg::{cokernel_basis, homology_basis, kernel_basis, rref, FpMatrix};
use syntomic_core::oracle;

fn matrix(p: u32, rows: usize, cols: usize) -> impl Strategy<Value = FpMatrix> {
    prop::collection::vec(0..p as i64, rows * cols).prop_map(move |v| {
        let rows: Vec<Vec<i64>> = v.chunks(cols).map(<[i64]>::to_vec).collect();
        FpMatrix::from_rows(p, cols, &rows).unwrap()
    })
}

fn any_matrix(max: usize) -> impl Strategy<Value = FpMatrix> {
    (prop::sample::select(vec![2u32, 3, 5, 7]), 1..=max, 1..=max).prop_flat_map(|(p, r, c)| matrix(p, r, c))
}

fn rows_of(m: &FpMatrix) -> Vec<Vec<u32>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

fn permuted_rows(m: &FpMatrix, perm: &[usize]) -> FpMatrix {
    let rows: Vec<Vec<i64>> = perm.iter().map(|&i| m.row(i).iter().map(|&x| x as i64).collect()).collect();
    FpMatrix::from_rows(m.prime(), m.cols(), &rows).unwrap()
}

#[test]
fn six_by_six_rank_matches_minors() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
    for _ in 0..20 {
        let rows: Vec<Vec<i64>> = (0..6).map(|_| (0..6).map(|_| rng.gen_range(0..5)).collect()).collect();
        let m = FpMatrix::from_rows(5, 6, &rows).unwrap();
        assert_eq!(m.rank(), oracle::minor_rank(5, &rows_of(&m), 6));
    }
}

#[test]
fn five_by_seven_kernel() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(57);
    for _ in 0..20 {
        let rows: Vec<Vec<i64>> = (0..5).map(|_| (0..7).map(|_| rng.gen_range(0..3)).collect()).collect();
        let m = FpMatrix::from_rows(3, 7, &rows).unwrap();
        let k = kernel_basis(&m);
        assert_eq!(k.len(), 7 - m.rank());
        assert!(k.iter().all(|v| m.apply(v).iter().all(|&x| x == 0)));
    }
}

proptest! {
    #[test]
    fn rref_is_idempotent_and_ranks_agree(m in any_matrix(6)) {
        let (r, pivots) = rref(&m);
        prop_assert_eq!(rref(&r).0, r.clone());
        prop_assert!(pivots.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(pivots.len(), m.rank());
        prop_assert_eq!(m.rank(), m.transpose().rank());
    }

    #[test]
    fn rank_nullity(m in any_matrix(6)) {
        let kernel = kernel_basis(&m);
        prop_assert_eq!(kernel.len() + m.rank(), m.cols());
        for v in &kernel {
            prop_assert!(m.apply(v).iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn cokernel_projection(m in any_matrix(6)) {
        let c = cokernel_basis(&m);
        prop_assert_eq!(c.representatives.len(), m.rows() - m.rank());
        prop_assert!(c.projection.mul(&m).unwrap().is_zero());
        for (k, &row) in c.representatives.iter().enumerate() {
            let mut e = vec![0; m.rows()];
            e[row] = 1;
            let image = c.projection.apply(&e);
            prop_assert!(image.iter().enumerate().all(|(i, &x)| x == u32::from(i == k)));
        }
    }

    #[test]
    fn homology_is_permutation_invariant(
        d_out in (prop::sample::select(vec![2u32, 3]), 1usize..=4, 1usize..=4).prop_flat_map(|(p, r, c)| matrix(p, r, c)),
        mix in prop::collection::vec(0u32..3, 16),
        shuffle in any::<prop::sample::Index>(),
    ) {
        let p = d_out.prime();
        let kernel = kernel_basis(&d_out);
        let columns: Vec<Vec<u32>> = (0..3)
            .map(|j| {
                let mut v = vec![0; d_out.cols()];
                for (i, k) in kernel.iter().enumerate() {
                    let c = mix[(i + 4 * j) % mix.len()] % p;
                    for (x, &y) in v.iter_mut().zip(k) {
                        *x = (*x + c * y) % p;
                    }
                }
                v
            })
            .collect();
        let d_in = FpMatrix::from_columns(p, d_out.cols(), &columns).unwrap();
        let h = homology_basis(&d_in, &d_out).unwrap();
        let expected = oracle::homology_dimension(p, &rows_of(&d_in), d_in.cols(), &rows_of(&d_out), d_in.rows());
        prop_assert_eq!(h.dimension(), expected);
        let mut perm: Vec<usize> = (0..d_out.rows()).collect();
        let shift = shuffle.index(perm.len());
        perm.rotate_left(shift);
        let twisted = homology_basis(&d_in, &permuted_rows(&d_out, &perm)).unwrap();
        prop_assert_eq!(twisted.dimension(), h.dimension());
        for z in &h.basis {
            prop_assert!(d_out.apply(z).iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn composite_modulus_is_rejected(p in prop::sample::select(vec![0u32, 1, 4, 6, 9, 15])) {
        prop_assert!(FpMatrix::zeros(p, 2, 2).is_err());
    }
}
