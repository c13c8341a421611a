/** Iterative radix-2 complex FFT in float64, plus the fftshift used by the
 * spectrogram convention (bin 0 <-> normalized frequency -0.5). */

const twiddleCache = new Map<number, { cos: Float64Array; sin: Float64Array }>();
const bitrevCache = new Map<number, Uint32Array>();

function twiddles(n: number) {
  let t = twiddleCache.get(n);
  if (!t) {
    const cos = new Float64Array(n / 2);
    const sin = new Float64Array(n / 2);
    for (let k = 0; k < n / 2; k++) {
      cos[k] = Math.cos((-2 * Math.PI * k) / n);
      sin[k] = Math.sin((-2 * Math.PI * k) / n);
    }
    t = { cos, sin };
    twiddleCache.set(n, t);
  }
  return t;
}

function bitrev(n: number): Uint32Array {
  let r = bitrevCache.get(n);
  if (!r) {
    r = new Uint32Array(n);
    const bits = Math.log2(n);
    for (let i = 0; i < n; i++) {
      let v = i;
      let out = 0;
      for (let b = 0; b < bits; b++) {
        out = (out << 1) | (v & 1);
        v >>= 1;
      }
      r[i] = out;
    }
    bitrevCache.set(n, r);
  }
  return r;
}

/** In-place FFT over separate re/im arrays; length must be a power of two. */
export function fft(re: Float64Array, im: Float64Array): void {
  const n = re.length;
  if ((n & (n - 1)) !== 0) throw new Error(`fft length ${n} is not a power of two`);
  const rev = bitrev(n);
  for (let i = 0; i < n; i++) {
    const j = rev[i];
    if (j > i) {
      let t = re[i]; re[i] = re[j]; re[j] = t;
      t = im[i]; im[i] = im[j]; im[j] = t;
    }
  }
  const { cos, sin } = twiddles(n);
  for (let len = 2; len <= n; len <<= 1) {
    const half = len >> 1;
    const step = n / len;
    for (let start = 0; start < n; start += len) {
      for (let k = 0; k < half; k++) {
        const tw = k * step;
        const i = start + k;
        const j = i + half;
        const tre = re[j] * cos[tw] - im[j] * sin[tw];
        const tim = re[j] * sin[tw] + im[j] * cos[tw];
        re[j] = re[i] - tre;
        im[j] = im[i] - tim;
        re[i] += tre;
        im[i] += tim;
      }
    }
  }
}

/** Rotate a length-n array so index n/2 comes first (numpy fftshift). */
export function fftshift(x: Float64Array): Float64Array {
  const n = x.length;
  const out = new Float64Array(n);
  const half = n >> 1;
  out.set(x.subarray(half), 0);
  out.set(x.subarray(0, half), n - half);
  return out;
}
