/// Decodes the compact string form of RLE counts: 5-bit groups with a
/// continuation bit, sign-extended, counts after the second stored as deltas
/// from the count two places earlier.
pub fn decode_counts_string(s: &str) -> Result<Vec<u32>, String> {
    let bytes = s.as_bytes();
    let mut counts: Vec<i64> = Vec::new();
    let mut p = 0;
    while p < bytes.len() {
        let mut x: i64 = 0;
        let mut k = 0;
        loop {
            if p >= bytes.len() {
                return Err("truncated counts string".into());
            }
            let c = bytes[p] as i64 - 48;
            if !(0..64).contains(&c) {
                return Err(format!("invalid character {:?} in counts string", bytes[p] as char));
            }
            x |= (c & 0x1f) << (5 * k);
            let more = c & 0x20 != 0;
            p += 1;
            k += 1;
            if !more {
                if c & 0x10 != 0 {
                    x |= -1i64 << (5 * k);
                }
                break;
            }
            if k > 12 {
                return Err("count too large in counts string".into());
            }
        }
        if counts.len() > 2 {
            x += counts[counts.len() - 2];
        }
        counts.push(x);
    }
    counts
        .into_iter()
        .map(|c| u32::try_from(c).map_err(|_| format!("count {c} out of range")))
        .collect()
}
