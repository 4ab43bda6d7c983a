// Public verifier page: hash/payload input, camera scan, and the three
// visually distinct result states.

import { ApiClient } from "./api";
import { checkQuery } from "./payload";
import { startScanner, Scanner } from "./qr";
import { CertificateRecord, VerificationResult, RECORD_FIELDS } from "./types";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function certificateTable(record: CertificateRecord): HTMLElement {
  const table = el("table", "certificate-fields");
  for (const { key, label } of RECORD_FIELDS) {
    const row = el("tr");
    row.appendChild(el("th", undefined, label));
    row.appendChild(el("td", undefined, record[key] as string));
    table.appendChild(row);
  }
  for (const [key, value] of Object.entries(record.extras)) {
    const row = el("tr", "extra-field");
    row.appendChild(el("th", undefined, key));
    row.appendChild(el("td", undefined, value));
    table.appendChild(row);
  }
  return table;
}

// One panel per verification outcome: green Valid with the full certificate,
// amber Superseded with the corrected certificate and the trail oldest-first,
// red NotFound with the registry's message.
export function renderResult(result: VerificationResult): HTMLElement {
  const panel = el("div", `result-panel status-${result.status.replace("_", "-")}`);
  if (result.status === "valid") {
    panel.appendChild(el("h3", "result-title", "Valid certificate"));
    panel.appendChild(certificateTable(result.certificate!));
    panel.appendChild(el("p", "result-hash", `Block hash: ${result.certificate_hash}`));
  } else if (result.status === "superseded") {
    panel.appendChild(el("h3", "result-title", "Superseded - a corrected version exists"));
    panel.appendChild(el("p", undefined, "Current certificate:"));
    panel.appendChild(certificateTable(result.certificate!));
    const trailTitle = el("p", undefined, "Supersession trail (oldest first):");
    panel.appendChild(trailTitle);
    const list = el("ol", "trail");
    for (const hop of result.trail) {
      list.appendChild(el("li", "trail-hop", hop));
    }
    panel.appendChild(list);
    panel.appendChild(el("p", "result-hash", `Current hash: ${result.certificate_hash}`));
  } else {
    panel.appendChild(el("h3", "result-title", "Not found"));
    panel.appendChild(el("p", "not-found-message", result.message ?? "Certificate does not exist"));
  }
  return panel;
}

export function createVerifierPage(api: ApiClient): HTMLElement {
  const page = el("section", "verifier-page");
  page.appendChild(el("h2", undefined, "Verify a certificate"));

  const form = el("form", "verify-form");
  const input = el("input") as HTMLInputElement;
  input.name = "query";
  input.placeholder = "64-hex hash or certchain://v1/... payload";
  input.size = 70;
  const submit = el("button", undefined, "Verify") as HTMLButtonElement;
  submit.type = "submit";
  const scanButton = el("button", "scan-button", "Scan QR") as HTMLButtonElement;
  scanButton.type = "button";
  form.append(input, submit, scanButton);
  page.appendChild(form);

  const inlineError = el("p", "inline-error");
  inlineError.hidden = true;
  page.appendChild(inlineError);

  const video = el("video", "scan-video") as HTMLVideoElement;
  video.hidden = true;
  page.appendChild(video);

  const output = el("div", "verify-output");
  page.appendChild(output);

  let scanner: Scanner | null = null;

  const runQuery = async (text: string) => {
    const checked = checkQuery(text);
    if (!checked.ok) {
      inlineError.textContent = checked.error;
      inlineError.hidden = false;
      output.replaceChildren();
      return;
    }
    inlineError.hidden = true;
    output.replaceChildren(el("p", "loading", "Checking..."));
    try {
      const result = await api.verify(checked.query);
      output.replaceChildren(renderResult(result));
    } catch (error) {
      const banner = el("div", "error-banner");
      banner.appendChild(el("p", undefined, `Verification failed: ${error}`));
      const retry = el("button", undefined, "Retry") as HTMLButtonElement;
      retry.type = "button";
      retry.addEventListener("click", () => void runQuery(input.value));
      banner.appendChild(retry);
      output.replaceChildren(banner);
    }
  };

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    void runQuery(input.value);
  });

  scanButton.addEventListener("click", () => {
    if (scanner) {
      scanner.stop();
      scanner = null;
      video.hidden = true;
      scanButton.textContent = "Scan QR";
      return;
    }
    video.hidden = false;
    scanButton.textContent = "Stop scan";
    startScanner(video, (text) => {
      scanner = null;
      video.hidden = true;
      scanButton.textContent = "Scan QR";
      input.value = text;
      void runQuery(text);
    })
      .then((s) => {
        scanner = s;
      })
      .catch((error) => {
        video.hidden = true;
        scanButton.textContent = "Scan QR";
        inlineError.textContent = `Camera unavailable: ${error}`;
        inlineError.hidden = false;
      });
  });

  return page;
}
