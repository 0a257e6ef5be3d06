import { describe, expect, it } from "vitest";

import { draftIsValid, draftToBody, emptyDraft, validateDraft } from "../src/validation.js";

function completeDraft() {
  return {
    ...emptyDraft(),
    requester_id: "u_ana",
    dataset_id: "transactions_2024",
    purpose: "Monthly analytics review",
  };
}

describe("validateDraft", () => {
  it("accepts a complete internal draft", () => {
    expect(validateDraft(completeDraft())).toEqual({});
    expect(draftIsValid(completeDraft())).toBe(true);
  });

  it("names every missing required field", () => {
    const errors = validateDraft(emptyDraft());
    expect(Object.keys(errors).sort()).toEqual(["dataset_id", "purpose", "requester_id"]);
  });

  it("flags an empty purpose without any network involvement", () => {
    const errors = validateDraft({ ...completeDraft(), purpose: "   " });
    expect(errors.purpose).toBe("purpose is required");
  });

  it("rejects non-positive or fractional retention", () => {
    for (const bad of [0, -3, 2.5]) {
      const errors = validateDraft({ ...completeDraft(), declared_retention_days: bad });
      expect(errors.declared_retention_days).toMatch(/positive whole number/);
    }
  });

  it("accepts positive integer retention", () => {
    expect(validateDraft({ ...completeDraft(), declared_retention_days: 30 })).toEqual({});
  });

  it("requires a destination for cross-border sharing", () => {
    const draft = { ...completeDraft(), sharing_scope: "cross_border" as const };
    expect(validateDraft(draft).destination_region).toMatch(/destination region is required/);
    expect(validateDraft({ ...draft, destination_region: "eu" })).toEqual({});
  });

  it("rejects a sharing scope outside the API enum", () => {
    const draft = { ...completeDraft(), sharing_scope: "public" as never };
    expect(validateDraft(draft).sharing_scope).toMatch(/unknown sharing scope/);
  });
});

describe("draftToBody", () => {
  it("omits empty optional fields", () => {
    const body = draftToBody(completeDraft());
    expect(body).toEqual({
      requester_id: "u_ana",
      dataset_id: "transactions_2024",
      purpose: "Monthly analytics review",
      sharing_scope: "internal",
    });
  });

  it("carries optional fields once set", () => {
    const body = draftToBody({
      ...completeDraft(),
      sharing_scope: "cross_border",
      destination_region: "eu",
      declared_retention_days: 30,
      external_party: "acme_ads",
    });
    expect(body.destination_region).toBe("eu");
    expect(body.declared_retention_days).toBe(30);
    expect(body.external_party).toBe("acme_ads");
  });

  it("trims surrounding whitespace", () => {
    const body = draftToBody({ ...completeDraft(), requester_id: " u_ana " });
    expect(body.requester_id).toBe("u_ana");
  });
});
