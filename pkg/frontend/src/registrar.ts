// Registrar console: key import, issue form, correction form with
// lookup/prefill, and the result screen with a downloadable QR image.

import { ApiClient, ApiError } from "./api";
import { checkQuery } from "./payload";
import { qrDataUrl } from "./qr";
import { importKeyFile, Session } from "./signing";
import { certificateTable } from "./verifier";
import { CertificateRecord, emptyRecord, RECORD_FIELDS } from "./types";

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

interface RecordForm {
  root: HTMLElement;
  read(): CertificateRecord;
  fill(record: CertificateRecord): void;
  showFieldError(field: string, message: string): void;
  clearErrors(): void;
}

export function createRecordForm(): RecordForm {
  const root = el("div", "record-form");
  const inputs = new Map<string, HTMLInputElement>();
  const errors = new Map<string, HTMLElement>();
  for (const { key, label } of RECORD_FIELDS) {
    const row = el("label", "field-row");
    row.appendChild(el("span", undefined, label));
    const input = el("input") as HTMLInputElement;
    input.name = key;
    row.appendChild(input);
    const error = el("span", "field-error");
    error.hidden = true;
    row.appendChild(error);
    root.appendChild(row);
    inputs.set(key, input);
    errors.set(key, error);
  }
  return {
    root,
    read() {
      const record = emptyRecord();
      for (const [key, input] of inputs) {
        (record as unknown as Record<string, string>)[key] = input.value;
      }
      record.issued_at = Math.floor(Date.now() / 1000);
      return record;
    },
    fill(record: CertificateRecord) {
      for (const [key, input] of inputs) {
        input.value = String(record[key as keyof CertificateRecord] ?? "");
      }
    },
    showFieldError(field: string, message: string) {
      const error = errors.get(field);
      if (error) {
        error.textContent = message;
        error.hidden = false;
      }
    },
    clearErrors() {
      for (const error of errors.values()) error.hidden = true;
    },
  };
}

function resultScreen(hash: string, qrPayload: string): HTMLElement {
  const screen = el("div", "issue-result");
  screen.appendChild(el("h3", undefined, "Certificate recorded"));
  screen.appendChild(el("p", "result-hash", hash));
  const img = el("img", "qr-image") as HTMLImageElement;
  img.alt = `QR code for ${qrPayload}`;
  img.src = qrDataUrl(qrPayload);
  screen.appendChild(img);
  const download = el("a", "qr-download", "Download QR image") as HTMLAnchorElement;
  download.href = img.src;
  download.download = `certificate-${hash.slice(0, 12)}.svg`;
  screen.appendChild(download);
  screen.appendChild(el("p", "qr-payload-text", qrPayload));
  return screen;
}

export function createRegistrarPage(api: ApiClient): HTMLElement {
  const page = el("section", "registrar-page");
  page.appendChild(el("h2", undefined, "Registrar console"));

  // --- key import -----------------------------------------------------
  let session: Session | null = null;
  const keyPanel = el("div", "key-panel");
  const keyStatus = el("p", "key-status", "No signing key imported");
  const keyInput = el("input") as HTMLInputElement;
  keyInput.type = "file";
  keyInput.accept = ".key,.json";
  keyPanel.append(keyStatus, keyInput);
  page.appendChild(keyPanel);

  keyInput.addEventListener("change", async () => {
    const file = keyInput.files?.[0];
    if (!file) return;
    try {
      session = await importKeyFile(await file.text());
      keyStatus.textContent = `Signing as ${session.keyId}`;
      keyStatus.classList.remove("key-error");
    } catch (error) {
      session = null;
      keyStatus.textContent = `Key import rejected: ${(error as Error).message}`;
      keyStatus.classList.add("key-error");
    }
  });

  const requireSession = (banner: HTMLElement): Session | null => {
    if (!session) {
      banner.textContent = "Import a signing key first";
      banner.hidden = false;
      return null;
    }
    return session;
  };

  const describeError = (error: unknown): string => {
    if (error instanceof ApiError) {
      if (error.status === 401) return `Key rejected: ${error.message}`;
      return error.message;
    }
    return String(error);
  };

  // --- issue form -----------------------------------------------------
  const issuePanel = el("div", "issue-panel");
  issuePanel.appendChild(el("h3", undefined, "Issue a certificate"));
  const issueForm = createRecordForm();
  issuePanel.appendChild(issueForm.root);
  const issueBanner = el("p", "banner");
  issueBanner.hidden = true;
  issuePanel.appendChild(issueBanner);
  const issueButton = el("button", undefined, "Issue") as HTMLButtonElement;
  issueButton.type = "button";
  issuePanel.appendChild(issueButton);
  const issueOutput = el("div", "issue-output");
  issuePanel.appendChild(issueOutput);
  page.appendChild(issuePanel);

  issueButton.addEventListener("click", async () => {
    issueForm.clearErrors();
    issueBanner.hidden = true;
    const active = requireSession(issueBanner);
    if (!active) return;
    try {
      const response = await api.issue(active, issueForm.read());
      issueOutput.replaceChildren(
        resultScreen(response.certificate_hash, response.qr_payload),
      );
    } catch (error) {
      if (error instanceof ApiError && error.status === 422 && error.field) {
        issueForm.showFieldError(error.field, error.message);
      } else {
        issueBanner.textContent = describeError(error);
        issueBanner.hidden = false;
      }
    }
  });

  // --- correction form ------------------------------------------------
  const correctionPanel = el("div", "correction-panel");
  correctionPanel.appendChild(el("h3", undefined, "Correct a certificate"));
  const lookupForm = el("form", "lookup-form");
  const oldHashInput = el("input") as HTMLInputElement;
  oldHashInput.name = "old_hash";
  oldHashInput.placeholder = "Hash of the certificate to correct";
  oldHashInput.size = 70;
  const lookupButton = el("button", undefined, "Load") as HTMLButtonElement;
  lookupButton.type = "submit";
  lookupForm.append(oldHashInput, lookupButton);
  correctionPanel.appendChild(lookupForm);

  const correctionBanner = el("p", "banner");
  correctionBanner.hidden = true;
  correctionPanel.appendChild(correctionBanner);

  const editArea = el("div", "correction-edit");
  editArea.hidden = true;
  const currentView = el("div", "current-certificate");
  editArea.appendChild(currentView);
  const correctionForm = createRecordForm();
  editArea.appendChild(correctionForm.root);
  const reasonRow = el("label", "field-row");
  reasonRow.appendChild(el("span", undefined, "Reason"));
  const reasonInput = el("input") as HTMLInputElement;
  reasonInput.name = "reason";
  reasonRow.appendChild(reasonInput);
  editArea.appendChild(reasonRow);
  const submitCorrection = el("button", undefined, "Submit correction") as HTMLButtonElement;
  submitCorrection.type = "button";
  editArea.appendChild(submitCorrection);
  correctionPanel.appendChild(editArea);

  const correctionOutput = el("div", "correction-output");
  correctionPanel.appendChild(correctionOutput);
  page.appendChild(correctionPanel);

  let targetHash: string | null = null;

  const loadTarget = async (raw: string) => {
    correctionBanner.hidden = true;
    correctionOutput.replaceChildren();
    editArea.hidden = true;
    const checked = checkQuery(raw);
    if (!checked.ok) {
      correctionBanner.textContent = checked.error;
      correctionBanner.hidden = false;
      return;
    }
    try {
      const result = await api.verify(checked.query);
      if (result.status === "not_found") {
        correctionBanner.textContent = "Certificate does not exist";
        correctionBanner.hidden = false;
        return;
      }
      if (result.status === "superseded") {
        // stale target: block editing, offer the latest version instead
        correctionBanner.replaceChildren();
        correctionBanner.appendChild(
          document.createTextNode(
            "This certificate was already corrected; corrections must target the latest version. ",
          ),
        );
        const jump = el("button", "jump-latest", "Go to latest version") as HTMLButtonElement;
        jump.type = "button";
        jump.addEventListener("click", () => {
          oldHashInput.value = result.certificate_hash!;
          void loadTarget(result.certificate_hash!);
        });
        correctionBanner.appendChild(jump);
        correctionBanner.hidden = false;
        return;
      }
      targetHash = checked.query;
      currentView.replaceChildren(
        el("p", undefined, `Editing certificate ${checked.query}`),
        certificateTable(result.certificate!),
      );
      correctionForm.clearErrors();
      correctionForm.fill(result.certificate!);
      editArea.hidden = false;
    } catch (error) {
      correctionBanner.textContent = describeError(error);
      correctionBanner.hidden = false;
    }
  };

  lookupForm.addEventListener("submit", (event) => {
    event.preventDefault();
    void loadTarget(oldHashInput.value);
  });

  submitCorrection.addEventListener("click", async () => {
    correctionForm.clearErrors();
    correctionBanner.hidden = true;
    const active = requireSession(correctionBanner);
    if (!active || !targetHash) return;
    try {
      const response = await api.correct(
        active,
        targetHash,
        correctionForm.read(),
        reasonInput.value,
      );
      correctionOutput.replaceChildren(
        resultScreen(response.new_certificate_hash, `certchain://v1/${response.new_certificate_hash}`),
        el("p", "correction-block", `Correction block: ${response.correction_block_hash}`),
      );
      editArea.hidden = true;
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        // lost a race: someone corrected it first
        correctionBanner.replaceChildren();
        correctionBanner.appendChild(
          document.createTextNode("Conflict: this certificate was corrected by someone else. "),
        );
        if (error.latestHash) {
          const jump = el("button", "jump-latest", "Go to latest version") as HTMLButtonElement;
          jump.type = "button";
          const latest = error.latestHash;
          jump.addEventListener("click", () => {
            oldHashInput.value = latest;
            void loadTarget(latest);
          });
          correctionBanner.appendChild(jump);
        }
        correctionBanner.hidden = false;
        editArea.hidden = true;
      } else if (error instanceof ApiError && error.status === 422 && error.field) {
        correctionForm.showFieldError(error.field, error.message);
      } else {
        correctionBanner.textContent = describeError(error);
        correctionBanner.hidden = false;
      }
    }
  });

  return page;
}
