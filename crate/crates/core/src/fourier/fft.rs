use crate::parallel;
use num_complex::Complex64;
use rustfft::FftPlanner;

/// In-place 2-D FFT of an `n × n` row-major array (unnormalised).
pub(crate) fn fft2(data: &mut [Complex64], n: usize, inverse: bool) {
    debug_assert_eq!(data.len(), n * n);
    let mut planner = FftPlanner::new();
    let fft = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
    let rows = |buf: &mut [Complex64]| {
        parallel::for_each_row(buf, n, |_, row| fft.process(row));
    };
    rows(data);
    transpose(data, n);
    rows(data);
    transpose(data, n);
}

fn transpose(data: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in i + 1..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}
