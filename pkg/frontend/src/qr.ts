// QR image generation (SVG, canvas-free) and camera scanning.

import jsQR from "jsqr";
import QRCode from "qrcode";

export function qrSvg(text: string, moduleSize = 6, border = 4): string {
  const code = QRCode.create(text, { errorCorrectionLevel: "M" });
  const size = code.modules.size;
  const dim = (size + 2 * border) * moduleSize;
  const cells: string[] = [];
  for (let y = 0; y < size; y++) {
    for (let x = 0; x < size; x++) {
      if (code.modules.get(x, y)) {
        cells.push(
          `<rect x="${(x + border) * moduleSize}" y="${(y + border) * moduleSize}" ` +
            `width="${moduleSize}" height="${moduleSize}"/>`,
        );
      }
    }
  }
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${dim} ${dim}">` +
    `<rect width="${dim}" height="${dim}" fill="#fff"/>` +
    `<g fill="#000">${cells.join("")}</g></svg>`
  );
}

export function qrDataUrl(text: string): string {
  return "data:image/svg+xml;base64," + btoa(qrSvg(text));
}

export interface FrameLike {
  data: Uint8ClampedArray;
  width: number;
  height: number;
}

export function decodeFrame(frame: FrameLike): string | null {
  const found = jsQR(frame.data, frame.width, frame.height);
  return found ? found.data : null;
}

export interface Scanner {
  stop(): void;
}

// Camera loop: draw video frames to a canvas and scan each one until a QR
// code is found or the scanner is stopped.
export async function startScanner(
  video: HTMLVideoElement,
  onResult: (text: string) => void,
): Promise<Scanner> {
  const stream = await navigator.mediaDevices.getUserMedia({
    video: { facingMode: "environment" },
  });
  video.srcObject = stream;
  await video.play();
  const canvas = document.createElement("canvas");
  const context = canvas.getContext("2d", { willReadFrequently: true })!;
  let active = true;

  const tick = () => {
    if (!active) return;
    if (video.readyState === video.HAVE_ENOUGH_DATA) {
      canvas.width = video.videoWidth;
      canvas.height = video.videoHeight;
      context.drawImage(video, 0, 0);
      const frame = context.getImageData(0, 0, canvas.width, canvas.height);
      const text = decodeFrame(frame);
      if (text !== null) {
        stop();
        onResult(text);
        return;
      }
    }
    requestAnimationFrame(tick);
  };

  const stop = () => {
    active = false;
    for (const track of stream.getTracks()) track.stop();
    video.srcObject = null;
  };

  requestAnimationFrame(tick);
  return { stop };
}
