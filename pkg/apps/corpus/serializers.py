from rest_framework import serializers

from apps.features.catalog import FEATURE_COUNT


class DatasetHeaderSerializer(serializers.Serializer):
    format = serializers.CharField()
    formatVersion = serializers.IntegerField(min_value=1)
    featureOrder = serializers.ListField(child=serializers.CharField(), allow_empty=False)
    createdAt = serializers.DateTimeField()
    corpusRoot = serializers.CharField(allow_blank=True)

    def validate_format(self, value):
        if value != "featurefuzz-dataset":
            raise serializers.ValidationError("not a featurefuzz dataset file")
        return value


class DatasetRecordSerializer(serializers.Serializer):
    """
    One corpus file.

    ``counts`` is null exactly when the file could not be lexed; ``reason``
    then carries the lexer's message.
    """

    id = serializers.CharField()
    parsable = serializers.BooleanField()
    counts = serializers.ListField(
        child=serializers.IntegerField(min_value=0),
        min_length=FEATURE_COUNT,
        max_length=FEATURE_COUNT,
        allow_null=True,
    )
    reason = serializers.CharField(required=False, allow_null=True, allow_blank=True)

    def validate(self, attrs):
        if attrs["parsable"] and attrs["counts"] is None:
            raise serializers.ValidationError({"counts": "parsable records need counts"})
        if not attrs["parsable"] and attrs["counts"] is not None:
            raise serializers.ValidationError({"counts": "unparsable records carry no counts"})
        return attrs


def first_error(errors) -> str:
    """Flatten a DRF error structure into one readable message."""
    if isinstance(errors, dict):
        for field, value in errors.items():
            return f"{field}: {first_error(value)}"
    if isinstance(errors, list) and errors:
        return first_error(errors[0])
    return str(errors)
