import { beforeEach, describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api";
import { renderResult, createVerifierPage } from "../src/verifier";
import {
  HASH_A,
  HASH_B,
  HASH_C,
  NOT_FOUND_RESULT,
  SUPERSEDED_RESULT,
  VALID_RESULT,
  jsonResponse,
} from "./fixtures";

describe("result rendering (fixture-driven)", () => {
  it("valid state is green and shows the full certificate", () => {
    const panel = renderResult(VALID_RESULT);
    expect(panel.className).toContain("status-valid");
    expect(panel.textContent).toContain("Valid certificate");
    expect(panel.textContent).toContain("Amina Rahman");
    expect(panel.textContent).toContain("BSc in Computer Science");
    expect(panel.textContent).toContain("magna cum laude");
    expect(panel.outerHTML).toMatchSnapshot();
  });

  it("superseded state is amber with the trail oldest first", () => {
    const panel = renderResult(SUPERSEDED_RESULT);
    expect(panel.className).toContain("status-superseded");
    const hops = Array.from(panel.querySelectorAll(".trail-hop")).map(
      (node) => node.textContent,
    );
    expect(hops).toEqual([HASH_A, HASH_B, HASH_C]);
    expect(panel.textContent).toContain("Amina Rahman-Khan");
    expect(panel.outerHTML).toMatchSnapshot();
  });

  it("not-found state is red with the registry message", () => {
    const panel = renderResult(NOT_FOUND_RESULT);
    expect(panel.className).toContain("status-not-found");
    expect(panel.querySelector(".not-found-message")!.textContent).toBe(
      "Certificate does not exist",
    );
    expect(panel.outerHTML).toMatchSnapshot();
  });

  it("all three states are visually distinct", () => {
    const classes = [VALID_RESULT, SUPERSEDED_RESULT, NOT_FOUND_RESULT].map(
      (fixture) => renderResult(fixture).className,
    );
    expect(new Set(classes).size).toBe(3);
  });
});

describe("verifier page", () => {
  beforeEach(() => {
    document.body.innerHTML = "";
  });

  function pageWith(fetchFn: typeof fetch) {
    const api = new ApiClient("http://api.test", fetchFn);
    const page = createVerifierPage(api);
    document.body.appendChild(page);
    return page;
  }

  it("renders the API result after submitting a hash", async () => {
    const fetchFn = vi.fn(async () => jsonResponse(VALID_RESULT));
    const page = pageWith(fetchFn);
    const input = page.querySelector("input")!;
    input.value = HASH_A;
    page.querySelector("form")!.dispatchEvent(new Event("submit", { cancelable: true }));
    await vi.waitFor(() => {
      expect(page.querySelector(".status-valid")).not.toBeNull();
    });
    expect(fetchFn).toHaveBeenCalledWith(`http://api.test/v1/verify/${HASH_A}`);
  });

  it("shows inline validation for 63 chars and sends no request", async () => {
    const fetchFn = vi.fn(async () => jsonResponse(VALID_RESULT));
    const page = pageWith(fetchFn);
    const input = page.querySelector("input")!;
    input.value = "a".repeat(63);
    page.querySelector("form")!.dispatchEvent(new Event("submit", { cancelable: true }));
    const error = page.querySelector(".inline-error") as HTMLElement;
    expect(error.hidden).toBe(false);
    expect(error.textContent).toContain("64 hex characters");
    expect(fetchFn).not.toHaveBeenCalled();
  });

  it("network failure shows a retry banner that re-queries", async () => {
    let calls = 0;
    const fetchFn = vi.fn(async () => {
      calls += 1;
      if (calls === 1) throw new TypeError("network down");
      return jsonResponse(VALID_RESULT);
    });
    const page = pageWith(fetchFn);
    const input = page.querySelector("input")!;
    input.value = HASH_A;
    page.querySelector("form")!.dispatchEvent(new Event("submit", { cancelable: true }));
    await vi.waitFor(() => {
      expect(page.querySelector(".error-banner")).not.toBeNull();
    });
    (page.querySelector(".error-banner button") as HTMLButtonElement).click();
    await vi.waitFor(() => {
      expect(page.querySelector(".status-valid")).not.toBeNull();
    });
    expect(calls).toBe(2);
  });
});
