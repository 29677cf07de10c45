// Wire types of the /v1 animator API (docs/api.md).  State values arrive as
// canonical ebv1 text; the client renders them and never evaluates anything.
export {};
